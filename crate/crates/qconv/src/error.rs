//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by oracle construction, circuit building, simulation and
/// the spectral routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("zero vector not allowed: {0}")]
    ZeroVector(&'static str),

    #[error("vector not normalized: ||v||_2 = {norm}")]
    NotNormalized { norm: f64 },

    #[error("qubit index {index} out of range for width {width}")]
    IndexOutOfRange { index: usize, width: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("register is not in the |0..0> state")]
    RegisterNotZero,

    #[error("postselection impossible: zero-outcome probability {prob:e} below 1e-14")]
    PostselectionImpossible { prob: f64 },

    #[error("kernel is singular: convolution operator not invertible")]
    NotInvertible,

    #[error("spectral promise violated: {0}")]
    PromiseViolation(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
