use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("field mismatch: {left:?} vs {right:?}")]
    FieldMismatch {
        left: crate::linalg::Field,
        right: crate::linalg::Field,
    },

    #[error("singular input: pivot {pivot:e} in column {column}")]
    Singular { column: usize, pivot: f64 },

    #[error("{what} = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("group tag mismatch: expected {expected}, got {actual}")]
    TagMismatch { expected: String, actual: String },

    #[error("empty input")]
    EmptyInput,

    #[error("series did not contract before m = {cap} (partial sum {partial:e})")]
    TruncationFailure { cap: u64, partial: f64 },

    #[error("no l <= {cap} brings c_n below {target:e} (achieved {achieved:e})")]
    NotFound { cap: u64, target: f64, achieved: f64 },

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }

    /// True for failures of a numerical procedure, as opposed to rejected input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. }
                | Error::TruncationFailure { .. }
                | Error::NotFound { .. }
                | Error::Internal(_)
        )
    }
}
