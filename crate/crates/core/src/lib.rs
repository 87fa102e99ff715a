//! Desk-scale laboratory for the quantum-accessible random oracle model.
//!
//! Everything here is sized for exhaustive or Monte-Carlo checking on a
//! laptop. None of the primitives offer real-world security.

pub mod error;
pub mod primitives;
pub mod qsim;
pub mod reductions;
pub mod rng;
pub mod schemes;
pub mod separation;
pub mod stats;

pub use error::{Error, Result};
