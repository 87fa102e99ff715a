use std::collections::HashMap;

use rand::seq::index::sample;
use rand::RngCore;
use serde::Serialize;

use super::{Meter, RoundHash};
use crate::error::Result;
use crate::qsim::{bht_collision_with, grover_success_probability, BhtParams};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttackResult {
    pub pair: Option<(u64, u64)>,
    /// Inputs the BHT indicator marked; 0 for the classical attacker.
    pub marked: u64,
    /// Success probability of this round given the sampled K (quantum only).
    pub exact_success: Option<f64>,
}

/// Queries distinct uniformly random inputs, at most `budget` of them, and
/// stops at the first ℓ-prefix collision.
pub fn classical_birthday_attacker(
    h: &RoundHash,
    budget: u64,
    meter: &mut Meter,
    rng: &mut dyn RngCore,
) -> Result<AttackResult> {
    let n = budget.min(h.domain()) as usize;
    let mut seen = HashMap::with_capacity(n);
    for x in sample(rng, h.domain() as usize, n) {
        let x = x as u64;
        let v = meter.eval(h, x)?;
        if let Some(&prev) = seen.get(&v) {
            return Ok(AttackResult {
                pair: Some((prev, x)),
                marked: 0,
                exact_success: None,
            });
        }
        seen.insert(v, x);
    }
    Ok(AttackResult {
        pair: None,
        marked: 0,
        exact_success: None,
    })
}

/// Expected success of BHT with |K| = k and j Grover iterations on a random
/// function from `domain` inputs to `range` outputs, using the mean marked
/// count (domain − k)·k/range.
pub fn analytic_bht_success(domain: u64, range: u64, k: u64, j: u64) -> f64 {
    let r = range as f64;
    let no_internal: f64 = (0..k).map(|i| 1.0 - i as f64 / r).product();
    let marked = (domain - k.min(domain)) as f64 * k as f64 / r;
    let theta = (marked / domain as f64).min(1.0).sqrt().asin();
    (1.0 - no_internal) + no_internal * ((2 * j + 1) as f64 * theta).sin().powi(2)
}

/// The (|K|, iterations) split of `budget` evaluations, lookup included,
/// with the best analytic success.
pub fn best_bht_split(budget: u64, domain: u64, range: u64) -> BhtParams {
    (1..budget.max(2))
        .map(|k| BhtParams {
            k: k as usize,
            iterations: budget.saturating_sub(k + 1),
        })
        .max_by(|a, b| {
            analytic_bht_success(domain, range, a.k as u64, a.iterations)
                .total_cmp(&analytic_bht_success(domain, range, b.k as u64, b.iterations))
        })
        .expect("non-empty split range")
}

/// BHT on the ℓ-truncated hash, with every evaluation (K, each Grover
/// iteration, the final lookup) charged to `meter`.
pub fn quantum_bht_attacker(
    h: &RoundHash,
    budget: u64,
    meter: &mut Meter,
    rng: &mut dyn RngCore,
) -> Result<AttackResult> {
    let table = h.truncated_table()?;
    let params = best_bht_split(budget, h.domain(), table.range());
    let out = bht_collision_with(&table, params, rng)?;
    meter.charge(out.evaluations);
    let exact = if out.marked == 0 {
        out.pair.is_some() as u8 as f64
    } else {
        grover_success_probability(h.domain(), out.marked, params.iterations)
    };
    Ok(AttackResult {
        pair: out.pair,
        marked: out.marked,
        exact_success: Some(exact),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::separation::{HashBackend, ISStarConfig};

    #[test]
    fn split_fits_the_budget() {
        let p = best_bht_split(16, 8192, 4096);
        assert_eq!(p.cost(), 16);
        assert!(p.k >= 3 && p.k <= 8, "{p:?}");
    }

    #[test]
    fn classical_exhausts_small_domains() {
        let cfg = ISStarConfig::new(4, 4, 1.0).unwrap();
        let h = RoundHash::new(cfg, 7, HashBackend::Keyed);
        let mut m = Meter::default();
        // 32 inputs into 16 prefixes always collide
        let r = classical_birthday_attacker(&h, 1000, &mut m, &mut stream(1)).unwrap();
        let (a, b) = r.pair.unwrap();
        assert!(h.is_near_collision(a, b));
        assert!(m.spent() <= 17);
    }
}
