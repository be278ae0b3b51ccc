//! Batch runner for the dequant-core experiments: JSON configs in, CSV
//! tables and a JSON summary out.

pub mod config;
pub mod experiments;
pub mod report;

use std::path::PathBuf;

pub use config::{ExperimentConfig, ExperimentId, Params};
pub use report::{Check, Report, Table};

#[derive(Debug)]
pub enum LabError {
    Config(String),
    Core(dequant_core::Error),
    Io { path: PathBuf, source: std::io::Error },
    Report(String),
}

impl std::fmt::Display for LabError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LabError::Config(msg) => write!(f, "invalid config: {msg}"),
            LabError::Core(e) => write!(f, "{e}"),
            LabError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            LabError::Report(msg) => write!(f, "report: {msg}"),
        }
    }
}

impl std::error::Error for LabError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            LabError::Core(e) => Some(e),
            LabError::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

impl From<dequant_core::Error> for LabError {
    fn from(e: dequant_core::Error) -> Self {
        LabError::Core(e)
    }
}

/// Runs the configured experiment and fills in the wall time.
pub fn run(config: &ExperimentConfig) -> Result<Report, LabError> {
    let start = std::time::Instant::now();
    let mut report = experiments::dispatch(config)?;
    report.wall_time_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}
