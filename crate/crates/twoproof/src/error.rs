use std::io;
use std::path::PathBuf;

/// Process exit status for a successful run.
pub const EXIT_OK: i32 = 0;
/// A checked property failed (soundness breach, oracle mismatch, anomaly).
pub const EXIT_VIOLATION: i32 = 1;
/// Bad arguments, unreadable input, or a size guard.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] twoproof_core::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },

    #[error("write failed: {0}")]
    Output(#[from] io::Error),

    #[error("{context}: {message}")]
    Parse { context: String, message: String },

    #[error("{0}")]
    Usage(String),

    #[error("property violation: {0}")]
    Violation(String),
}

impl CliError {
    pub fn parse(context: impl Into<String>, message: impl ToString) -> Self {
        CliError::Parse { context: context.into(), message: message.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Violation(_) | CliError::Core(twoproof_core::Error::Anomaly(_)) => EXIT_VIOLATION,
            _ => EXIT_USAGE,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
