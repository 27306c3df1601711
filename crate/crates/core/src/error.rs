use thiserror::Error;

use crate::set::ElementId;

/// Errors raised by matroid, threshold and contention-resolution operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("element {element} is out of range for a ground set of size {size}")]
    OutOfRange { element: ElementId, size: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An invariant that holds for every matroid failed; the oracle is broken.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
