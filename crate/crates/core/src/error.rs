use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two inputs coincide where distinct ones are required.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// An iterative measure computation did not reach its tolerance.
    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    /// The polynomial root finder did not converge.
    #[error("numeric failure after {iterations} iterations: {detail}")]
    Numeric { iterations: usize, detail: String },

    /// A request would need more memory or time than the configured guard allows.
    #[error("resource limit: {0}")]
    Resource(String),

    /// One column of a density field failed; the others that finished are
    /// listed for diagnosis.
    #[error("column {column} (t = {t}) failed: {source}; {} columns completed", completed.len())]
    Column {
        column: usize,
        t: f64,
        source: Box<Error>,
        completed: Vec<usize>,
    },

    /// Malformed text or binary input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
