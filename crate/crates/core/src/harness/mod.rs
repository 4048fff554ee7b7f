//! Configuration-driven experiment runs with JSON-lines and CSV output.

pub mod config;
pub mod output;
mod run;

use thiserror::Error;

pub use config::{ExperimentConfig, Kind};
pub use output::{read_jsonl, write_outputs, OutputRecord, SCHEMA_VERSION};
pub use run::{calibrate, run, RunOutcome};

/// Worker-count variable; unset means sequential.
pub const WORKERS_ENV: &str = "CLRANK_WORKERS";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("experiment failed: {0}")]
    Experiment(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Config(_) => 1,
            _ => 2,
        }
    }
}

/// Worker threads requested through [`WORKERS_ENV`].
pub fn workers_from_env() -> Result<usize, HarnessError> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(1),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(HarnessError::Config(format!("{WORKERS_ENV}: expected a positive integer, got {v:?}"))),
        },
    }
}

/// Run `f` on a dedicated pool with `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, HarnessError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::Experiment(e.to_string()))?;
    Ok(pool.install(f))
}
