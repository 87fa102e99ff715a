//! Toy instantiations of the building blocks: trapdoor permutations,
//! claw-free pairs, preimage-sampleable functions, classical random oracles
//! and a keyed mixing function standing in for a quantum-accessible PRF.
//!
//! All of these are small enough to enumerate. They are secure only in the
//! information-theoretic, query-bounded sense and nothing more.

mod gmr;
mod prf;
mod psf;
mod ro;
mod tdp;

pub use gmr::{gmr_clawfree_gen, ClawFree, GmrPair, GmrPublic, GmrSecret, TableClawFree};
pub use prf::{prf_eval, Qprf};
pub use psf::{psf_from_clawfree, table_psf_gen, table_psf_skewed, ClawFreePsf, Psf, TablePsf};
pub use ro::{ClassicalRO, RoBacking};
pub use tdp::{table_tdp_gen, TableTdp, TdpPublicKey, TdpSecretKey};

/// Sampler coins derived from a 64-bit oracle answer.
pub fn coins_from(value: u64) -> crate::rng::Stream {
    crate::rng::stream(crate::rng::mix64(value))
}
