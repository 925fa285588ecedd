//! Command line front end: limit measures, sampling, Monte Carlo checks of
//! the limit theorems and spectral measures, with JSON and CSV output.

pub mod args;
pub mod commands;
pub mod config;

pub use commands::{cmd_limit, cmd_sample, cmd_spectral, cmd_verify, replay, run, SCHEMA};
pub use config::{Command, Partial, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] moment_spaces::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("verification failed: {}", .0.join(", "))]
    VerifyFailed(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use moment_spaces::Error as E;
        match self {
            CliError::Core(E::NotAdmissible | E::Infeasible { .. }) => 2,
            CliError::Core(E::NonIntegrable { .. }) => 3,
            CliError::Core(E::DegenerateMinimizer(_)) => 4,
            CliError::Core(E::ChainNotConverged { .. }) => 5,
            CliError::VerifyFailed(_) => 6,
            _ => 1,
        }
    }
}
