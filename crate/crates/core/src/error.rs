use thiserror::Error;

/// Errors raised across the library.
///
/// The CLI reports every variant as a structured error with exit code 2.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Operands built under different `(q, m)` settings, or an invalid setting.
    #[error("configuration error: {0}")]
    Config(String),
    /// Input outside the domain of an operation (pole at the evaluation point, zero center, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A lattice sum that does not converge absolutely.
    #[error("divergence: {0}")]
    Divergence(String),
    /// A documented precondition was violated by the caller.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// Work would exceed the configured budget.
    #[error("resource limit: {0}")]
    Resource(String),
    /// A test could not reach a conclusion on the data given.
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable tag used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::Domain(_) => "domain",
            Error::Divergence(_) => "divergence",
            Error::Precondition(_) => "precondition",
            Error::Resource(_) => "resource",
            Error::Inconclusive(_) => "inconclusive",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
