use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate image: zero total intensity")]
    DegenerateImage,

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("grid mismatch: {left} pixels vs {right} pixels (or differing width/origin)")]
    GridMismatch { left: usize, right: usize },

    #[error("parameter not identifiable from this image")]
    NotIdentifiable,

    #[error("no sign change of θ²F(θ) − 1 on [{lo}, {hi}]: g(lo) = {g_lo}, g(hi) = {g_hi}")]
    NoSignChange { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },

    #[error("finite-difference step {step} not converged: halving it changed F by {relative_change:e} (relative)")]
    StepNotConverged { step: f64, relative_change: f64 },

    #[error("POVM has no designated null outcome (k = 0 with i_0 = 0)")]
    NoNullOutcome,

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
