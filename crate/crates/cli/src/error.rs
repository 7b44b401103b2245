use conformal_exact::ConformalError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {message}")]
    Input { path: String, message: String },

    #[error("line {line}: {message}")]
    Dataset { line: u64, message: String },

    #[error(transparent)]
    Core(#[from] ConformalError),

    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self::Usage(message.into())
    }

    pub fn dataset(line: u64, message: impl Into<String>) -> Self {
        Self::Dataset {
            line,
            message: message.into(),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
