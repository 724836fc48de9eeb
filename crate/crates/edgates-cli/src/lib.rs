//! Batch front end for `edgates`: configuration, orchestration and file output.

pub mod commands;
pub mod config;

use edgates::bloch::BlochError;
use edgates::circuits::CircuitError;
use edgates::closure::ClosureError;
use edgates::codes::CodeError;
use edgates::metrics::MetricsError;
use thiserror::Error;

pub use commands::*;
pub use config::ExperimentConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Closure(#[from] ClosureError),
    #[error(transparent)]
    Bloch(#[from] BlochError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error("cannot start worker pool: {0}")]
    Workers(String),
}

impl CliError {
    /// 2 for configuration problems, 1 for everything that fails later.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}
