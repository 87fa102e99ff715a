use serde::{Deserialize, Serialize};

use super::NORM_TOL;
use crate::error::{Error, Result};

/// Probability distribution over `0..len`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() || probs.iter().any(|p| !p.is_finite() || *p < -NORM_TOL) {
            return Err(Error::InvalidParameter("probabilities must be finite and non-negative".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(total));
        }
        Ok(Self(probs))
    }

    pub fn uniform(len: usize) -> Self {
        Self(vec![1.0 / len as f64; len])
    }

    pub fn point(len: usize, at: usize) -> Self {
        let mut p = vec![0.0; len];
        p[at] = 1.0;
        Self(p)
    }

    /// Uniform shifted by +ε/2 on `up` and −ε/2 on `down`, which puts it at
    /// exactly ε (sum convention) from uniform.
    pub fn skewed(len: usize, eps: f64, up: usize, down: usize) -> Result<Self> {
        let base = 1.0 / len as f64;
        if up == down || eps < 0.0 || eps / 2.0 > base || up >= len || down >= len {
            return Err(Error::InvalidParameter(format!("cannot plant skew {eps} on {len} outcomes")));
        }
        let mut p = vec![base; len];
        p[up] += eps / 2.0;
        p[down] -= eps / 2.0;
        Self::new(p)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Σ_x |Pr[x|d1] − Pr[x|d2]|, with no factor ½.
pub fn total_variation(d1: &Distribution, d2: &Distribution) -> Result<f64> {
    if d1.len() != d2.len() {
        return Err(Error::DimensionMismatch(d1.len(), d2.len()));
    }
    Ok(d1.0.iter().zip(&d2.0).map(|(a, b)| (a - b).abs()).sum())
}
