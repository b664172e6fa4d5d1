use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DfaError {
    #[error("scale {scale} too small for order {order} (need at least {min})")]
    ScaleTooSmall {
        order: usize,
        scale: usize,
        min: usize,
    },

    #[error("Gram matrix numerically singular for order {order}, scale {scale}")]
    SingularGram { order: usize, scale: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("the increment form requires order >= 1")]
    OrderZeroUnsupported,

    #[error("closed-form weights exist only for orders 1 and 2 (got {0})")]
    UnsupportedOrder(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("tabulated model covers lags up to {available}, need {required}")]
    InsufficientTableLags { required: usize, available: usize },

    #[error("correction factor must be positive (got {0})")]
    NonpositiveCorrection(f64),

    #[error("scale {scale} exceeds series length {len}")]
    ScaleExceedsLength { scale: usize, len: usize },

    #[error("no pair of present values in any window at scale {scale}")]
    AllPairsMissing { scale: usize },

    #[error("need at least {needed} defined scales in the fit range, found {found}")]
    TooFewPoints { needed: usize, found: usize },

    #[error("circulant embedding failed: {0}")]
    EmbeddingFailure(String),

    #[error("series has no present values")]
    EmptySeries,
}

pub type Result<T> = std::result::Result<T, DfaError>;

pub(crate) fn domain(msg: impl Into<String>) -> DfaError {
    DfaError::Domain(msg.into())
}
