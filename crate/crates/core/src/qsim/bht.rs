use std::collections::HashMap;

use rand::RngCore;
use serde::Serialize;

use super::grover::{amplify, grover_iterations};
use super::oracle::OracleTable;
use crate::error::{Error, Result};

/// Smallest c with c³ ≥ n.
pub fn ceil_cbrt(n: u64) -> u64 {
    let mut c = (n as f64).cbrt().round() as u64;
    while c.saturating_pow(3) < n {
        c += 1;
    }
    while c > 0 && (c - 1).saturating_pow(3) >= n {
        c -= 1;
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BhtParams {
    /// |K|, inputs queried classically up front.
    pub k: usize,
    /// Grover iterations on the collision indicator.
    pub iterations: u64,
}

impl BhtParams {
    /// Hash evaluations a run costs: K, one per iteration, one final lookup.
    pub fn cost(&self) -> u64 {
        self.k as u64 + self.iterations + 1
    }
}

/// |K| = ⌈∛R⌉ for a hash with R possible outputs, and ⌊(π/4)√(R/|K|)⌋
/// iterations, which is the optimal count when about |K|·2^in/R inputs are
/// marked.
pub fn default_bht_params(hash: &OracleTable) -> BhtParams {
    let k = ceil_cbrt(hash.range()).max(1) as usize;
    BhtParams {
        k,
        iterations: grover_iterations(hash.range(), k as u64),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BhtOutcome {
    pub pair: Option<(u64, u64)>,
    /// Hash evaluations spent, counting every Grover iteration as one.
    pub evaluations: u64,
    /// Inputs the indicator marked (0 when K collided internally).
    pub marked: u64,
}

/// Brassard-Høyer-Tapp with the default parameters. Every evaluation is
/// counted; the total is at most `2·⌈∛R⌉` once R ≥ 64.
pub fn bht_collision(hash: &OracleTable, rng: &mut dyn RngCore) -> Result<BhtOutcome> {
    bht_collision_with(hash, default_bht_params(hash), rng)
}

pub fn bht_collision_with(hash: &OracleTable, params: BhtParams, rng: &mut dyn RngCore) -> Result<BhtOutcome> {
    let domain = 1usize << hash.in_bits();
    if params.k == 0 || params.k > domain {
        return Err(Error::InvalidParameter(format!("|K| = {} for a domain of {domain}", params.k)));
    }
    let k_set: Vec<u64> = rand::seq::index::sample(rng, domain, params.k)
        .into_iter()
        .map(|x| x as u64)
        .collect();
    let mut evaluations = 0u64;
    let mut seen: HashMap<u64, u64> = HashMap::with_capacity(params.k);
    for &m in &k_set {
        evaluations += 1;
        if let Some(&prev) = seen.get(&hash.get(m)) {
            return Ok(BhtOutcome {
                pair: Some((prev, m)),
                evaluations,
                marked: 0,
            });
        }
        seen.insert(hash.get(m), m);
    }
    let mut in_k = vec![false; domain];
    k_set.iter().for_each(|&m| in_k[m as usize] = true);
    let indicator = OracleTable::from_fn(hash.in_bits(), 2, |m| {
        (!in_k[m as usize] && seen.contains_key(&hash.get(m))) as u64
    })?;
    let marked = indicator.rows().iter().sum();
    let (m, _) = amplify(&indicator, params.iterations, rng)?;
    evaluations += params.iterations + 1;
    let pair = if in_k[m as usize] {
        None
    } else {
        seen.get(&hash.get(m)).map(|&partner| (m, partner))
    };
    Ok(BhtOutcome {
        pair,
        evaluations,
        marked,
    })
}
