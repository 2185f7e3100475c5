//! Error type shared by the analytic engine and the simulator.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum ModelError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid scheduling probabilities: {0}")]
    InvalidProbs(String),

    /// EC transmission range would cover more cells than the network has.
    #[error("coverage of {gamma} cells exceeds the {cells}-cell network")]
    CoverageExceedsNetwork { gamma: u32, cells: u32 },

    /// The source queue has no stationary law when both the arrival and the
    /// service probability equal one.
    #[error("degenerate source queue: lambda_s = 1 together with mu_s = 1")]
    DegenerateSourceQueue,

    #[error(
        "fixed-point iteration did not converge after {iterations} iterations \
         (last residual {residual:e})"
    )]
    FixedPointDiverged { iterations: u32, residual: f64 },

    /// A limiting-form regime was requested with parameters that contradict it.
    #[error("regime {regime} requires {requirement}")]
    RegimeMismatch {
        regime: &'static str,
        requirement: String,
    },

    /// The reference stationary solver refuses reducible or periodic chains.
    #[error("degenerate chain: {0}")]
    DegenerateChain(String),
}

pub type Result<T> = std::result::Result<T, ModelError>;

impl ModelError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        ModelError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
