//! Small helpers for Monte-Carlo bookkeeping.

use serde::Serialize;

/// Binomial standard error of a proportion `p` estimated from `n` trials.
pub fn binomial_sigma(p: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (p * (1.0 - p) / n as f64).max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct Rate {
    pub hits: usize,
    pub trials: usize,
}

impl Rate {
    pub fn new(hits: usize, trials: usize) -> Self {
        Self { hits, trials }
    }

    pub fn value(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.hits as f64 / self.trials as f64
        }
    }

    /// Standard error under the hypothesised rate `p`.
    pub fn sigma_at(&self, p: f64) -> f64 {
        binomial_sigma(p, self.trials)
    }

    /// Standard error using the measured rate.
    pub fn sigma(&self) -> f64 {
        binomial_sigma(self.value(), self.trials)
    }

    /// |measured − expected| ≤ k·σ(expected).
    pub fn within(&self, expected: f64, k: f64) -> bool {
        (self.value() - expected).abs() <= k * self.sigma_at(expected) + 1e-12
    }
}

/// Mean and standard error of the mean.
pub fn mean_sem(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
