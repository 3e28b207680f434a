//! Command-line front end for `apify-core`: loads a workspace described by
//! a JSON config, runs discovery and signature analysis, and prints JSON.

pub mod analysis;
pub mod commands;
pub mod config;
pub mod openapi;
pub mod output;
pub mod project;

use thiserror::Error;

/// Failures of a command, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("{file}: {source}")]
    Parse { file: String, source: apify_core::Error },
    #[error("unresolved selector {0}")]
    Selector(String),
    #[error("{0}")]
    Budget(apify_core::Error),
    #[error("{0}")]
    Analysis(apify_core::Error),
    /// Property violations found by `verify`; carries the full report.
    #[error("property violation")]
    Verify(String),
}

impl CliError {
    /// Wraps an analysis error, singling out an exhausted path budget.
    pub fn from_analysis(e: apify_core::Error) -> CliError {
        match e {
            apify_core::Error::PathBudgetExceeded(_) => CliError::Budget(e),
            e => CliError::Analysis(e),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) | CliError::Parse { .. } => 2,
            CliError::Selector(_) => 3,
            CliError::Budget(_) => 4,
            CliError::Verify(_) => 5,
            CliError::Analysis(_) => 1,
        }
    }
}
