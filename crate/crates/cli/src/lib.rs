//! Library half of `susyprop`: configuration, table output, the subcommands,
//! verification suites and SVG plots.

pub mod commands;
pub mod config;
pub mod plot;
pub mod table;
pub mod verify;

use susy_core::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Failure classes, one per process exit code.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("convergence failure: {0}")]
    Convergence(String),
    #[error("inadmissible chain: {0}")]
    Admissibility(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Convergence(_) => 3,
            CliError::Admissibility(_) => 4,
        }
    }

    pub fn from_core(e: Error) -> Self {
        match e {
            Error::ConditionViolation(_) | Error::NodelessViolation { .. } => CliError::Admissibility(e.to_string()),
            Error::Convergence(_) => CliError::Convergence(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}
