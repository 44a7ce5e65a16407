use thiserror::Error;

/// CLI failures, each with its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Runtime(String),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Runtime(_) => 1,
            CliError::Config(_) => 2,
            CliError::Budget(_) => 3,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl From<extamen::Error> for CliError {
    fn from(e: extamen::Error) -> Self {
        match e {
            extamen::Error::Config(_) | extamen::Error::Parse(_) => CliError::Config(e.to_string()),
            extamen::Error::Budget { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("i/o error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Runtime(format!("malformed record: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
