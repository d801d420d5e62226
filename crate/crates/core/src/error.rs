use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid pulse specification: {0}")]
    InvalidPulse(String),
    #[error("ISI matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("frame length {0} is odd; coordinate interleaving needs symbol pairs")]
    OddLength(usize),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("exhaustive search over {0} symbols exceeds the limit of {max}", max = crate::detect::MLSE_MAX_LEN)]
    TooLarge(usize),
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("invalid parity-check matrix: {0}")]
    ParityMatrix(String),
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
