use thiserror::Error;

/// Error type shared by all subsystems.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("not positive definite: pivot {pivot} at index {index} is not positive")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("enumeration budget exceeded: needed about {needed}, budget {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("last-row pivot too small: |M_p1| = {value} <= {threshold}")]
    PivotTooSmall { value: f64, threshold: f64 },

    #[error("singular input: {0}")]
    Singular(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
