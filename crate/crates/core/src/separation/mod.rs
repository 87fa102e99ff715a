//! The IS* identification protocol: r timed near-collision rounds followed
//! by an ordinary identification stage. Time is counted in hash
//! evaluations.

mod attack;
mod report;

pub use attack::{
    analytic_bht_success, best_bht_split, classical_birthday_attacker, quantum_bht_attacker, AttackResult,
};
pub use report::{
    birthday_bound, bound_report, bound_report_with, chernoff_classical, quantum_bound_094, quantum_bound_r16, simulate,
    BoundReport, BoundRow, RunSummary,
};

use std::sync::Arc;

use rand::RngCore;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::primitives::{prf_eval, ClassicalRO};
use crate::qsim::{ceil_cbrt, Codomain, Oracle, OracleTable};
use crate::schemes::SignatureScheme;

/// ℓ above this is refused for the state-vector attacker.
pub const MAX_QUANTUM_ELL: u32 = 14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ISStarConfig {
    pub ell: u32,
    pub rounds: usize,
    pub alpha: f64,
    pub hash_in_bits: u32,
    pub hash_out_bits: u32,
    pub unsafe_params: bool,
}

impl ISStarConfig {
    /// Defaults: hash input ℓ+1 bits, output 16 bits (or ℓ if wider).
    pub fn new(ell: u32, rounds: usize, alpha: f64) -> Result<Self> {
        Self {
            ell,
            rounds,
            alpha,
            hash_in_bits: ell + 1,
            hash_out_bits: ell.max(16),
            unsafe_params: false,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.ell == 0 || self.ell > 40 {
            return bad(format!("ℓ = {} outside 1..=40", self.ell));
        }
        if self.rounds < 4 {
            return bad(format!("{} rounds; the r/4 rule needs at least 4", self.rounds));
        }
        if !self.alpha.is_finite() || self.alpha < 1.0 {
            return bad(format!("α = {} must be at least 1", self.alpha));
        }
        if self.hash_out_bits < self.ell || self.hash_out_bits > 64 || self.hash_in_bits == 0 || self.hash_in_bits > 40 {
            return bad(format!(
                "hash widths {}→{} do not fit ℓ = {}",
                self.hash_in_bits, self.hash_out_bits, self.ell
            ));
        }
        if !self.unsafe_params && self.ell as f64 <= 6.0 * self.alpha.log2() {
            return bad(format!(
                "ℓ = {} is not above 6·log2(α) = {:.3}; pass the unsafe flag to run it anyway",
                self.ell,
                6.0 * self.alpha.log2()
            ));
        }
        Ok(self)
    }

    pub fn with_unsafe(mut self, unsafe_params: bool) -> Self {
        self.unsafe_params = unsafe_params;
        self
    }

    /// ⌈α·∛(2^ℓ)⌉, computed as the least c with c³ ≥ α³·2^ℓ.
    pub fn classical_budget(&self) -> u64 {
        let target = self.alpha.powi(3) * (self.ell as f64).exp2();
        let mut c = (self.alpha * (self.ell as f64).exp2().cbrt()).floor().max(1.0) as u64;
        while c > 1 && ((c - 1) as f64).powi(3) >= target * (1.0 - 1e-12) {
            c -= 1;
        }
        while (c as f64).powi(3) < target * (1.0 - 1e-12) {
            c += 1;
        }
        c
    }

    /// ⌈∛(2^ℓ)⌉.
    pub fn quantum_budget(&self) -> u64 {
        ceil_cbrt(1u64 << self.ell)
    }

    pub fn prefix(&self, h: u64) -> u64 {
        h >> (self.hash_out_bits - self.ell)
    }
}

/// b* = 1 iff b = 1 or collCount > r/4.
pub fn accept(b: bool, coll_count: usize, rounds: usize) -> bool {
    b || 4 * coll_count > rounds
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HashBackend {
    /// H(k, x) = the toy PRF under key k.
    Keyed,
    /// A lazily sampled random function seeded by k.
    Lazy,
}

/// H(k_i, ·) for one round.
pub struct RoundHash {
    cfg: ISStarConfig,
    key: u64,
    lazy: Option<ClassicalRO>,
}

impl RoundHash {
    pub fn new(cfg: ISStarConfig, key: u64, backend: HashBackend) -> Self {
        let lazy = match backend {
            HashBackend::Keyed => None,
            HashBackend::Lazy => Some(ClassicalRO::lazy(cfg.hash_in_bits, Codomain::bits(cfg.hash_out_bits), key)),
        };
        Self { cfg, key, lazy }
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    pub fn domain(&self) -> u64 {
        1u64 << self.cfg.hash_in_bits
    }

    pub fn eval(&self, x: u64) -> Result<u64> {
        if x >= self.domain() {
            return Err(Error::DomainOverflow {
                input: x,
                size: self.domain() as u128,
            });
        }
        match &self.lazy {
            Some(ro) => ro.query(x),
            None => Ok(prf_eval(self.key, x, self.cfg.hash_out_bits)),
        }
    }

    /// H(k_i, x)|_ℓ.
    pub fn truncated(&self, x: u64) -> Result<u64> {
        Ok(self.cfg.prefix(self.eval(x)?))
    }

    /// The verifier's check, from (k_i, M, M′) alone.
    pub fn is_near_collision(&self, m: u64, m2: u64) -> bool {
        m != m2
            && matches!((self.truncated(m), self.truncated(m2)), (Ok(a), Ok(b)) if a == b)
    }

    /// The truncated hash as a table, for superposition access.
    pub fn truncated_table(&self) -> Result<OracleTable> {
        let rows = (0..self.domain()).map(|x| self.truncated(x)).collect::<Result<Vec<_>>>()?;
        OracleTable::from_rows(self.cfg.hash_in_bits, 1u64 << self.cfg.ell, rows)
    }
}

/// Hash-evaluation counter for one round.
#[derive(Debug, Default)]
pub struct Meter {
    spent: u64,
}

impl Meter {
    pub fn eval(&mut self, h: &RoundHash, x: u64) -> Result<u64> {
        self.spent += 1;
        h.truncated(x)
    }

    pub fn charge(&mut self, n: u64) {
        self.spent += n;
    }

    pub fn spent(&self) -> u64 {
        self.spent
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Prover {
    /// Holds the identification key and skips the collision stage.
    Honest,
    /// No key, no collisions.
    Impersonator,
    ClassicalBirthday,
    QuantumBht,
    /// Hands over valid collisions, found off the clock, in the first
    /// `collisions` rounds. Test fixture for the accept rule.
    Planted { collisions: usize },
}

impl Prover {
    fn has_key(&self) -> bool {
        matches!(self, Prover::Honest)
    }
}

/// The identification stage underneath the collision rounds.
pub trait Identification: Send + Sync {
    fn identify(&self, prover_has_key: bool, rng: &mut dyn RngCore) -> Result<bool>;
}

/// Accepts exactly the key holder.
#[derive(Debug, Clone, Copy, Default)]
pub struct StubIdentification;

impl Identification for StubIdentification {
    fn identify(&self, prover_has_key: bool, _rng: &mut dyn RngCore) -> Result<bool> {
        Ok(prover_has_key)
    }
}

/// Challenge-response with a signature scheme: the verifier picks a random
/// message, the prover signs it (or guesses without the key).
pub struct SignatureIdentification {
    pub scheme: Arc<dyn SignatureScheme>,
    pub oracle: Arc<dyn Oracle>,
}

impl Identification for SignatureIdentification {
    fn identify(&self, prover_has_key: bool, rng: &mut dyn RngCore) -> Result<bool> {
        let bits = self.scheme.msg_bits();
        let m = if bits >= 64 { rng.next_u64() } else { rng.next_u64() & ((1u64 << bits) - 1) };
        let sigma = if prover_has_key {
            self.scheme.sign(m, self.oracle.as_ref(), rng)?
        } else {
            rng.next_u64() % self.scheme.oracle_codomain().size().min(u64::MAX as u128) as u64
        };
        self.scheme.verify(m, sigma, self.oracle.as_ref())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CollisionValid,
    CollisionInvalid,
    BudgetExceeded,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundRecord {
    pub round: usize,
    pub key: u64,
    pub prover: Prover,
    pub spent: u64,
    pub budget: u64,
    pub pair: Option<(u64, u64)>,
    pub verdict: Verdict,
    /// Success probability of the quantum attack given its sampled K.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_success: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ISStarTranscript {
    pub config: ISStarConfig,
    pub prover: Prover,
    pub rounds: Vec<RoundRecord>,
    pub coll_count: usize,
    pub b: bool,
    pub accept: bool,
}

fn budget_for(cfg: &ISStarConfig, prover: Prover) -> u64 {
    match prover {
        Prover::QuantumBht => cfg.quantum_budget(),
        _ => cfg.classical_budget(),
    }
}

/// One protocol run. Keys k_i are fresh 64-bit draws from `rng`; the
/// verifier re-checks every submitted pair itself.
pub fn run_isstar(
    cfg: &ISStarConfig,
    prover: Prover,
    ident: &dyn Identification,
    backend: HashBackend,
    rng: &mut dyn RngCore,
) -> Result<ISStarTranscript> {
    let cfg = cfg.validated()?;
    if prover == Prover::QuantumBht && cfg.ell > MAX_QUANTUM_ELL {
        return Err(Error::InvalidParameter(format!(
            "quantum attacker needs ℓ ≤ {MAX_QUANTUM_ELL}, got {}",
            cfg.ell
        )));
    }
    let budget = budget_for(&cfg, prover);
    let mut rounds = Vec::with_capacity(cfg.rounds);
    let mut coll_count = 0;
    for i in 0..cfg.rounds {
        let key = rng.next_u64();
        let h = RoundHash::new(cfg, key, backend);
        let mut meter = Meter::default();
        let (pair, exact_success) = match prover {
            Prover::Honest | Prover::Impersonator => (None, None),
            Prover::ClassicalBirthday => (classical_birthday_attacker(&h, budget, &mut meter, rng)?.pair, None),
            Prover::QuantumBht => {
                let a = quantum_bht_attacker(&h, budget, &mut meter, rng)?;
                (a.pair, a.exact_success)
            }
            Prover::Planted { collisions } if i < collisions => (planted_collision(&h)?, None),
            Prover::Planted { .. } => (None, None),
        };
        let verdict = match pair {
            _ if meter.spent() > budget => Verdict::BudgetExceeded,
            Some((m, m2)) if h.is_near_collision(m, m2) => Verdict::CollisionValid,
            Some(_) => Verdict::CollisionInvalid,
            None => Verdict::None,
        };
        coll_count += (verdict == Verdict::CollisionValid) as usize;
        rounds.push(RoundRecord {
            round: i,
            key,
            prover,
            spent: meter.spent(),
            budget,
            pair,
            verdict,
            exact_success,
        });
    }
    let b = ident.identify(prover.has_key(), rng)?;
    Ok(ISStarTranscript {
        config: cfg,
        prover,
        rounds,
        coll_count,
        b,
        accept: accept(b, coll_count, cfg.rounds),
    })
}

fn planted_collision(h: &RoundHash) -> Result<Option<(u64, u64)>> {
    let mut seen = std::collections::HashMap::new();
    for x in 0..h.domain() {
        if let Some(&prev) = seen.get(&h.truncated(x)?) {
            return Ok(Some((prev, x)));
        }
        seen.insert(h.truncated(x)?, x);
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn budgets() {
        let c = ISStarConfig::new(12, 64, 2.0).unwrap();
        assert_eq!(c.classical_budget(), 32);
        assert_eq!(c.quantum_budget(), 16);
        let c = ISStarConfig::new(13, 64, 1.5).unwrap();
        // 1.5·∛8192 = 30.24
        assert_eq!(c.classical_budget(), 31);
    }

    #[test]
    fn validation() {
        assert!(ISStarConfig::new(12, 0, 2.0).is_err());
        assert!(ISStarConfig::new(12, 3, 2.0).is_err());
        assert!(ISStarConfig::new(12, 64, 0.5).is_err());
        // 6·log2(4) = 12, not strictly below ℓ
        assert!(ISStarConfig::new(12, 64, 4.0).is_err());
        let mut c = ISStarConfig::new(12, 64, 2.0).unwrap();
        c.alpha = 4.0;
        assert!(c.with_unsafe(true).validated().is_ok());
    }

    #[test]
    fn honest_and_impersonator() {
        let c = ISStarConfig::new(8, 8, 1.0).unwrap();
        let t = run_isstar(&c, Prover::Honest, &StubIdentification, HashBackend::Keyed, &mut stream(1)).unwrap();
        assert!(t.accept && t.b && t.coll_count == 0);
        let t = run_isstar(&c, Prover::Impersonator, &StubIdentification, HashBackend::Keyed, &mut stream(1)).unwrap();
        assert!(!t.accept && !t.b);
    }

    #[test]
    fn accept_rule_boundary() {
        let c = ISStarConfig::new(8, 8, 1.0).unwrap();
        for (n, want) in [(2, false), (3, true)] {
            let t = run_isstar(
                &c,
                Prover::Planted { collisions: n },
                &StubIdentification,
                HashBackend::Lazy,
                &mut stream(2),
            )
            .unwrap();
            assert_eq!(t.coll_count, n);
            assert_eq!(t.accept, want);
        }
    }

    #[test]
    fn keys_are_fresh() {
        let c = ISStarConfig::new(8, 64, 1.0).unwrap();
        let t = run_isstar(&c, Prover::ClassicalBirthday, &StubIdentification, HashBackend::Keyed, &mut stream(3)).unwrap();
        let keys: std::collections::HashSet<_> = t.rounds.iter().map(|r| r.key).collect();
        assert_eq!(keys.len(), 64);
        assert!(t.rounds.iter().all(|r| r.spent <= r.budget));
    }
}
