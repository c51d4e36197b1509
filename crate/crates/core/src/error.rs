use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),

    #[error("unknown name `{0}`")]
    Unknown(String),

    #[error("exact enumeration needs {needed} evaluations, budget is {budget}; rerun in sampled mode")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("malformed file: {0}")]
    Format(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
