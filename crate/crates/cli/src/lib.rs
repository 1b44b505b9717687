//! Command-line runner for `dkp-core`.
//!
//! Every subcommand resolves its parameters (config file, then `--set`, then
//! explicit flags), runs, and persists its outputs into
//! `<runs-dir>/<timestamp>-<short-hash>/` with `manifest.json` written last.

pub mod args;
pub mod commands;
pub mod config;
pub mod persist;
pub mod plot;

use std::path::PathBuf;

pub use args::Cli;
pub use commands::run;
pub use config::ParamMap;
pub use persist::{RunManifest, RunStatus};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] dkp_core::Error),
    #[error("missing output: {0}")]
    MissingOutput(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed data: {0}")]
    Data(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
