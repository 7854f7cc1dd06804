//! Driver for the `fluxqmc` binary: config loading, pipelines and output
//! files.

pub mod config;
pub mod output;
pub mod pipeline;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{load, parse, Experiment, Overrides, Pipeline};
pub use pipeline::{Outcome, Row};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error(transparent)]
    Numerical(#[from] fluxqmc_core::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) | CliError::Io(_) => 2,
        }
    }
}

/// Runs the pipeline and writes its output files. Returns the output
/// directory.
pub fn execute(exp: &Experiment) -> Result<PathBuf, CliError> {
    let outcome = pipeline::run(exp)?;
    output::write_all(&exp.output_dir, exp, &outcome)?;
    Ok(exp.output_dir.clone())
}
