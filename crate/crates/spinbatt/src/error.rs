use thiserror::Error;

/// Failure classes with their process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Numeric(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<spinbatt_core::Error> for CliError {
    fn from(e: spinbatt_core::Error) -> Self {
        match e {
            spinbatt_core::Error::Resource { .. } => CliError::Usage(e.to_string()),
            other => CliError::Numeric(other.to_string()),
        }
    }
}
