use thiserror::Error;

/// Errors raised by oracles, subproblem solvers and certificates.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point outside the domain: {0}")]
    DomainViolation(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no sign change found after {expansions} bracket expansions")]
    Bracketing { expansions: usize },

    #[error("root finder did not converge in {iterations} iterations (last residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("matrix not positive definite: pivot {pivot} is {value:e}")]
    Singular { pivot: usize, value: f64 },

    #[error("matrix has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("subproblem not available: {0}")]
    SubproblemUnavailable(String),

    #[error("dual problem unbounded: golden-section bracket diverged")]
    UnboundedDual,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("finite-difference derivative unreliable: {0}")]
    FiniteDifference(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
