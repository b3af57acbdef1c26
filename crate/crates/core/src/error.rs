use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("channel is not trace preserving (max deviation {0:.3e})")]
    NotCptp(f64),

    #[error("unsupported instruction: {0}")]
    Unsupported(String),

    #[error("fault flips {0} detectors; hyperedges are not supported")]
    Hyperedge(usize),

    #[error("syndrome not covered by erasure (vertex {0})")]
    NotCovered(usize),

    #[error("refused: {0}")]
    Refused(String),

    #[error("insufficient statistics: {0}")]
    InsufficientStatistics(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
