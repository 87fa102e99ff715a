//! Dense state-vector simulation of algorithms that query classical tables
//! in superposition.
//!
//! Qubit `i` is bit `i` of a basis index. Registers are contiguous
//! [`QubitRange`]s, so the value held by a register in basis state `idx` is
//! `(idx >> start) & mask`.

mod bht;
mod dist;
mod grover;
pub mod lemmas;
mod oracle;
pub mod script;
mod state;
mod trace;

pub use bht::{bht_collision, bht_collision_with, ceil_cbrt, default_bht_params, BhtOutcome, BhtParams};
pub use dist::{total_variation, Distribution};
pub use grover::{amplify, grover_iterations, grover_search, grover_state, grover_success_probability};
pub use oracle::{
    apply_xor_oracle, resample_oracle_at, sample_near_uniform_oracle, Codomain, FnOracle, Oracle,
    OracleTable,
};
pub use state::{euclidean_distance, partial_measure, QubitRange, StateVector, DEFAULT_QUBIT_CAP};
pub use trace::{QueryTrace, TraceEntry, FULL_TRACE_MAX_BITS};

/// Normalization tolerance used throughout.
pub const NORM_TOL: f64 = 1e-9;
