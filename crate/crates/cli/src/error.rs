use thiserror::Error;

/// Failure of a subcommand, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration, arguments or input data (exit 2).
    #[error("{0}")]
    Input(String),
    /// Reading or writing a file failed (exit 3).
    #[error("{0}")]
    Io(String),
    /// Numerical or exactness failure during a computation (exit 4).
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    pub(crate) fn io(what: &str, path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{what} {}: {e}", path.display()))
    }
}

impl From<tcross::Error> for CliError {
    fn from(e: tcross::Error) -> Self {
        match e {
            tcross::Error::InvalidInput(_) | tcross::Error::UnsupportedModel(_) => CliError::Input(e.to_string()),
            tcross::Error::Exactness(_) => CliError::Numerical(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
