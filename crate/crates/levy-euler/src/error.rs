//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the measure, sampler, scheme and statistics layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge: achieved tolerance {achieved:e}, requested {requested:e} on [{a}, {b}]")]
    QuadratureNotConverged {
        achieved: f64,
        requested: f64,
        a: f64,
        b: f64,
    },

    #[error("small-jump tolerance unreachable: cutoff {required_cutoff:e} would need ~{expected_jumps:.3e} jumps per path (budget {budget:.3e})")]
    SmallJumpBudget {
        required_cutoff: f64,
        expected_jumps: f64,
        budget: f64,
    },

    #[error("series truncation level {level} too small: residual tail mass estimate {residual:e} exceeds tolerance {tolerance:e}")]
    SeriesTruncation {
        level: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("state became non-finite at step {step}")]
    NonFiniteState { step: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("hypothesis check inconclusive: {0}")]
    Inconclusive(String),

    #[error("missing input: {0}")]
    MissingInput(String),

    #[error("reference self-consistency failure: metric changed by {relative_change:.3}x of the coarse error under refinement doubling (limit {limit})")]
    ReferenceSelfConsistency { relative_change: f64, limit: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
