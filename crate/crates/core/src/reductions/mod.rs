//! History-free reductions for the signature schemes, a driver that plays
//! them against planted forgers, and the two encryption-proof experiments.
//!
//! A reduction's state `z` is the reduction value itself; `rand`, `sign`
//! and `finish` take `&self` plus the classical oracle `O_c`, so nothing
//! can leak between queries.

mod audit;
mod cca;
mod game;
mod sig;

pub use audit::{rand_uniformity_audit, replay_rand, UniformityReport};
pub use cca::{
    cca_inverter_experiment, cca_symmetric_forwarding_experiment, game1_transcript, CcaAdversary, CcaTranscript,
    DecQuery, ExtractionStats, ForwardingOutcome,
};
pub use game::{run_games, run_signature_game, ForgeStrategy, GameOutcome, GameTally, PlantedForger};
pub use sig::{decode_pair, oc_for, ClawFreeFdhReduction, FdhPsfReduction, KatzWangReduction, OC_RETRY};

use serde::Serialize;

use crate::error::Result;
use crate::primitives::ClassicalRO;
use crate::qsim::{Codomain, Distribution, Oracle};

/// What `finish` hands to the challenger of the underlying problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Solution {
    /// Distinct x1, x2 with f(x1) = f(x2).
    Collision { x1: u64, x2: u64 },
    /// f1(x1) = f2(x2).
    Claw { x1: u64, x2: u64 },
}

pub trait HistoryFreeReduction: Send + Sync {
    fn name(&self) -> &'static str;
    fn msg_bits(&self) -> u32;
    fn oracle_in_bits(&self) -> u32;
    fn oracle_codomain(&self) -> Codomain;

    /// RAND^{O_c}(r, z).
    fn rand(&self, r: u64, oc: &ClassicalRO) -> Result<u64>;
    /// SIGN^{O_c}(m, z); `None` is an abort.
    fn sign(&self, m: u64, oc: &ClassicalRO) -> Result<Option<u64>>;
    /// FINISH^{O_c}(m, σ, z); `None` is an abort.
    fn finish(&self, m: u64, sigma: u64, oc: &ClassicalRO) -> Result<Option<Solution>>;

    /// The scheme's verifier relative to `oracle`.
    fn verify_signature(&self, m: u64, sigma: u64, oracle: &dyn Oracle) -> Result<bool>;
    /// The problem challenger's check, from public data only.
    fn verify_solution(&self, s: &Solution) -> bool;

    /// Exact distribution of O(r) for any single r when O_c is random.
    fn point_distribution(&self) -> Result<Distribution>;
}

/// The scheme oracle O(r) = RAND^{O_c}(r, z), logging every answer.
pub struct RandOracle<'a> {
    reduction: &'a dyn HistoryFreeReduction,
    oc: &'a ClassicalRO,
    log: std::sync::Mutex<Vec<(u64, u64)>>,
}

impl<'a> RandOracle<'a> {
    pub fn new(reduction: &'a dyn HistoryFreeReduction, oc: &'a ClassicalRO) -> Self {
        Self {
            reduction,
            oc,
            log: Default::default(),
        }
    }

    pub fn log(&self) -> Vec<(u64, u64)> {
        self.log.lock().unwrap().clone()
    }
}

impl Oracle for RandOracle<'_> {
    fn in_bits(&self) -> u32 {
        self.reduction.oracle_in_bits()
    }

    fn codomain(&self) -> Codomain {
        self.reduction.oracle_codomain()
    }

    fn query(&self, r: u64) -> Result<u64> {
        self.check_input(r)?;
        let v = self.reduction.rand(r, self.oc)?;
        self.log.lock().unwrap().push((r, v));
        Ok(v)
    }
}
