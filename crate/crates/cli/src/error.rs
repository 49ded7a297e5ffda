use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Module(#[from] mtlab_core::Error),

    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// 2 for configuration errors, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Module(_) | CliError::Io(_) => 1,
        }
    }

    fn category(&self) -> ErrorCategory {
        match self {
            CliError::Config(_) => ErrorCategory::Config,
            CliError::Module(_) => ErrorCategory::Module,
            CliError::Io(_) => ErrorCategory::Io,
        }
    }

    pub fn record(&self, command: Option<&str>) -> ErrorRecord {
        ErrorRecord {
            status: "error".into(),
            command: command.map(str::to_string),
            category: self.category(),
            message: self.to_string(),
            exit_code: self.exit_code(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorCategory {
    Config,
    Module,
    Io,
}

/// JSON record written when a run fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub status: String,
    pub command: Option<String>,
    pub category: ErrorCategory,
    pub message: String,
    pub exit_code: i32,
}
