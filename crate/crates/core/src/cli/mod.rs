//! Command-line front end: JSON configuration, input functions, pipelines
//! and output files.

mod config;
pub mod expr;
mod run;
mod selftest;

use std::path::PathBuf;

pub use config::{
    parse_config, BasisTerm, Family, FunctionDescriptor, Mode, RunConfig, ToleranceSettings, DEFAULT_OUTPUT_DIR,
};
pub use run::{execute, run, Outcome, Report, RunOptions};
pub use selftest::{selftest, SelftestCase};

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_VERDICT: u8 = 2;
pub const EXIT_CONFIG: u8 = 3;
pub const EXIT_INPUT: u8 = 4;
pub const EXIT_NUMERICAL: u8 = 5;

/// Text for `--help`.
pub const EXIT_CODES_HELP: &str = "Exit codes:
  0  success
  1  I/O error (reading inputs, writing outputs)
  2  a residual, oracle or self-test verdict failed
  3  configuration error (JSON syntax, invalid fields, bad arguments)
  4  rejected input (incompatible data, invalid domain, unreadable csv)
  5  numerical failure (accuracy, instability, degenerate horizon)";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Invalid(Vec<String>),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Pipeline(#[from] crate::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use crate::Error as E;
        match self {
            CliError::Io { .. } => EXIT_IO,
            CliError::Syntax { .. } | CliError::Invalid(_) => EXIT_CONFIG,
            CliError::Input(_) => EXIT_INPUT,
            CliError::Pipeline(E::Domain(_) | E::Pole { .. } | E::UnsupportedRange { .. } | E::Config(_)) => EXIT_INPUT,
            CliError::Pipeline(E::Accuracy { .. } | E::DegenerateHorizon { .. } | E::Unstable(_)) => EXIT_NUMERICAL,
        }
    }
}
