use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error("exactness violated: {0}")]
    Exactness(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Same error with `prefix: ` prepended to the message.
    pub fn context(self, prefix: &str) -> Self {
        match self {
            Error::InvalidInput(m) => Error::InvalidInput(format!("{prefix}: {m}")),
            Error::UnsupportedModel(m) => Error::UnsupportedModel(format!("{prefix}: {m}")),
            Error::Exactness(m) => Error::Exactness(format!("{prefix}: {m}")),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
