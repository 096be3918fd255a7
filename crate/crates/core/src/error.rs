use thiserror::Error;

/// Crate-wide error type.
#[derive(Error, Debug)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested phantom/operation combination is not supported.
    #[error("unsupported phantom: {0}")]
    UnsupportedPhantom(String),

    /// Mesh cannot resolve the requested Fourier order.
    #[error("mesh too coarse: {0}")]
    MeshResolution(String),

    /// An iterative solver failed to reach its tolerance.
    #[error("solver failed: {what} (residual {residual:.3e} after {iterations} iterations)")]
    SolverFailure {
        what: String,
        residual: f64,
        iterations: usize,
    },

    /// Evaluation at a singular point of a kernel.
    #[error("domain error: {0}")]
    Domain(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
