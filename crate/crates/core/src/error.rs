use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported capability: {0}")]
    Unsupported(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("quadrature did not converge: estimate {estimate:e}, error estimate {error:e}")]
    QuadratureNonConvergence { estimate: f64, error: f64 },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("solver did not converge after {iterations} iterations (KKT residual {residual:e})")]
    SolverNonConvergence { iterations: usize, residual: f64 },

    #[error("infeasible point: {0}")]
    Infeasible(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
}
