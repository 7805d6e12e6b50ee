//! Experiment configuration and drivers.
//!
//! Each subcommand reads an [`ExperimentConfig`], writes versioned output
//! files into the output directory and returns a [`RunReport`]. Errors are
//! [`HarnessError`]s; [`RunReport::exit_code`] and
//! [`HarnessError::exit_code`] give the process exit status: 0 on success,
//! 1 when an acceptance check fails, 2 for configuration and other errors.

mod commands;
mod config;
mod output;

pub use commands::{
    abstract_sim, analytic_curves, discrimination, oracle_check, run, schelling, AnalyticRow, AssociationRow,
    HistogramRow, OracleRow, SchellingRow, Subcommand, TrialRow,
};
pub use config::{
    AbstractSimSection, AnalyticSection, DiscriminationSection, ExperimentConfig, HistogramSection, OracleSection,
    OutputFormat, PolicyCode, RhoGrid, SamplerName, SchellingSection, DEFAULT_MASTER_SEED, MIN_ORACLE_TRIALS,
};
pub use output::{data_body, render_table, write_table, FileHeader, CODE_VERSION, SCHEMA_VERSION};

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("writing output: {0}")]
    Output(String),
    #[error("simulation failed: {0}")]
    Run(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    /// False when an acceptance check failed.
    pub passed: bool,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}
