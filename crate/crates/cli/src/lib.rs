//! Configuration parsing, sweep orchestration and CSV emission for `kcc-core`.

pub mod config;
pub mod experiment;

pub use config::{parse_config, Case, ConfigError, ExperimentConfig, Group};
pub use experiment::{run_experiment, OutputFile, RunReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVARIANT: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("cannot access {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io { .. } | CliError::ThreadPool(_) => EXIT_NUMERIC,
        }
    }
}
