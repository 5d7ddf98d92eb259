use std::process::ExitCode;

use mnbound_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),

    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),

    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CliError::Invalid(msg.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        let code = match self {
            CliError::Invalid(_) => 2,
            CliError::OracleMismatch(_) => 3,
            CliError::Core(CoreError::InvalidInput(_) | CoreError::Overflow(_)) => 2,
            CliError::Core(CoreError::NonConvergence { .. }) => 4,
            CliError::Core(CoreError::CapExceeded { .. }) => 5,
        };
        ExitCode::from(code)
    }
}

pub type CliResult<T> = Result<T, CliError>;
