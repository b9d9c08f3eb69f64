//! Configuration, experiment orchestration and CSV output for the `radcoex` binary.

pub mod commands;
pub mod config;
pub mod output;
pub mod validate;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error(transparent)]
    Model(#[from] radcoex::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0} validation check(s) failed")]
    Validation(usize),
}

impl CliError {
    /// 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}
