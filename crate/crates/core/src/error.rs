use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid bounds: {0}")]
    InvalidBounds(String),

    #[error("coordinate {index} is not finite")]
    NonFinite { index: usize },

    #[error("evaluation budget of {max} exhausted")]
    BudgetExceeded { max: u64 },

    #[error("unknown benchmark function `{0}`")]
    UnknownFunction(String),

    #[error("`{name}` does not support dimension {dim}")]
    UnsupportedDimension { name: String, dim: usize },

    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("`{0}` has no known minimum, so tolerance-based success is undefined")]
    MissingOptimum(String),

    #[error("cannot summarize an empty set of trials")]
    EmptyResults,
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParam(msg.into())
    }
}
