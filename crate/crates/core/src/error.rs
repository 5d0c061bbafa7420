use thiserror::Error;

/// Errors produced by the solvers, the enumeration oracle and the CLI layer.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An operation was called with arguments it does not handle, such as a bad grid.
    #[error("usage error: {0}")]
    Usage(String),

    /// The parameter point lies outside the regime an operation is valid for.
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("state space too large: 3^{sites} configurations exceeds the cap of {limit}")]
    StateSpace { sites: usize, limit: u64 },

    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    /// A boundary law handed to the marginal formula is not a verified fixed point.
    #[error("boundary law rejected: residual {residual:e} exceeds {threshold:e}")]
    UnverifiedLaw { residual: f64, threshold: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
