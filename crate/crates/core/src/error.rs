use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what} needs {requested} qubits, cap is {cap}")]
    TooManyQubits {
        what: &'static str,
        requested: usize,
        cap: usize,
    },
    #[error("qubit index {index} out of range for {num_qubits}-qubit state")]
    QubitOutOfRange { index: usize, num_qubits: usize },
    #[error("registers overlap")]
    RegisterOverlap,
    #[error("width mismatch: expected {expected}, got {got}")]
    WidthMismatch { expected: u64, got: u64 },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("not normalized: total mass {0}")]
    NotNormalized(f64),
    #[error("measured subspace has no mass")]
    ZeroMass,
    #[error("input {input} outside a domain of size {size}")]
    DomainOverflow { input: u64, size: u128 },
    #[error("no marked element")]
    NoMarkedElement,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("secret key not available")]
    MissingTrapdoor,
    #[error("ciphertext rejected")]
    Rejected,
    #[error("query budget of {budget} exceeded")]
    QueryBudget { budget: usize },
    #[error("transcript divergence at event {0}")]
    TranscriptDivergence(usize),
    #[error("forger signed its own forgery message")]
    InvalidForgery,
}

pub type Result<T> = std::result::Result<T, Error>;
