//! Experiment driver: runs the wagering and market experiments and writes
//! CSV tables plus a JSON summary per subcommand.

pub mod commands;
pub mod config;
mod output;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{ExperimentConfig, NoiseChoice};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] privmarket::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config(message.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(
                privmarket::Error::Domain { .. }
                | privmarket::Error::Profile(_)
                | privmarket::Error::EnumerationCap { .. }
                | privmarket::Error::LinearRegion(_),
            ) => 2,
            _ => 1,
        }
    }
}

/// What a subcommand produced and which invariants, if any, it saw fail.
#[derive(Debug, Default)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub violations: Vec<String>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.violations.is_empty() {
            0
        } else {
            1
        }
    }

    fn check(&mut self, ok: bool, message: impl FnOnce() -> String) {
        if !ok {
            self.violations.push(message());
        }
    }
}
