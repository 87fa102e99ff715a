//! Seeded batch experiments over qrom-core, shared by the `qrom` binary
//! and its tests.

pub mod demo;
pub mod lemmas;
pub mod prehash;
pub mod reduce;
pub mod report;
pub mod separation;

use std::path::PathBuf;

use clap::{Args, ValueEnum};

use report::Format;

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Trial count; each subcommand has its own default.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Keyed,
    Lazy,
}
