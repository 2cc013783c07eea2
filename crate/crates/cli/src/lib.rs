//! Configuration, expression language, sweeps and CSV tables for the
//! `neumann` command-line tool.

pub mod config;
pub mod expr;
pub mod runner;
pub mod table;

use std::path::PathBuf;

pub use config::{CaseName, MapName, ModeName, Quad, RunConfig};
pub use runner::run_config;
pub use table::{read_table, summarize, write_table, Summary, TableRow};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },
    #[error("expression error: {0}")]
    Expression(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config: {0}")]
    Config(#[from] toml::de::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("solver: {0}")]
    Solver(#[from] neumann_spectral::Error),
    #[error("need at least 4 rows for a summary, found {0}")]
    TooFewRows(usize),
    #[error("acceptance check failed: {0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn validation(field: &str, message: impl Into<String>) -> Self {
        CliError::Validation {
            field: field.to_string(),
            message: message.into(),
        }
    }

    /// 2 for a failed `--check`, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::CheckFailed(_) => 2,
            _ => 1,
        }
    }
}
