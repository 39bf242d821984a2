use thiserror::Error;

/// Errors raised across the simulator.
///
/// The variant decides the CLI exit code: `Usage`, `Config` and `Domain`
/// map to 2, everything else is an internal failure.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative routine failed to converge.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// An operation was called with the wrong kind of scenario.
    #[error("usage error: {0}")]
    Usage(String),
    /// A run configuration cannot be honoured.
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
