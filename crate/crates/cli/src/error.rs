use std::process::ExitCode;

use ising_core::ErrorKind;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),

    /// A computation finished but did not certify or verify.
    #[error("{0}")]
    Convergence(String),

    #[error(transparent)]
    Core(#[from] ising_core::Error),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Convergence(_) => 3,
            CliError::Core(e) if e.kind() == ErrorKind::Convergence => 3,
            _ => 2,
        }
    }

    pub fn exit(&self) -> ExitCode {
        ExitCode::from(self.exit_code())
    }
}
