use std::process::ExitCode;

use colf_bench::BenchError;
use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

/// Exit 2 for a command that cannot run as given, 1 when the data is at fault.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        CliError::Data(msg.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Data(_) => ExitCode::from(1),
        }
    }
}

impl From<colf::Error> for CliError {
    fn from(e: colf::Error) -> Self {
        match e {
            colf::Error::NotColf(_) | colf::Error::Config(_) | colf::Error::Name(_) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Colf(e) => e.into(),
            BenchError::Config(m) => CliError::Usage(m),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}
