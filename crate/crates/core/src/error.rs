use thiserror::Error;

/// Errors raised by parameter construction, sampling, estimation and the
/// simulation harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sample at branch point: x = {x} hits the generator pole")]
    BranchPoint { x: f64 },

    #[error("degenerate estimate: {0}")]
    Degenerate(String),

    #[error("degenerate initializer: generator {generator} gave Im(Y) = {im}")]
    DegenerateInitializer { generator: String, im: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("pullback pole: angle {angle} maps to the point 1 on the unit circle")]
    PullbackPole { angle: f64 },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("all {replications} replications failed: {mode}")]
    AllReplicationsFailed { replications: u64, mode: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
