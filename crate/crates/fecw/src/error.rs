use thiserror::Error;

/// Errors surfaced by the workbench library.
#[derive(Debug, Error)]
pub enum Error {
    /// A function was called with arguments violating its contract.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The run configuration is malformed or internally inconsistent.
    #[error("configuration error: {0}")]
    Config(String),

    /// A policy referenced a statistic the trial records do not carry.
    #[error("records do not carry the required statistic: {0}")]
    MissingStatistic(String),

    /// A tuning sweep found no threshold meeting the BLER ceiling.
    #[error("no feasible threshold meets the BLER ceiling")]
    Infeasible,

    /// An I/O failure, with the path or stream that caused it.
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
