//! Command-line driver and file formats for the vmprox solver toolkit:
//! LIBSVM dataset parsing (optionally gzip-compressed), JSON run
//! configuration, CSV convergence traces, and the run/compare/verify/
//! reference subcommands.

pub mod commands;
pub mod config;
pub mod csvout;
pub mod io;

use thiserror::Error;

/// Top-level failure of a subcommand, mapped onto process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or malformed dataset input (exit 2).
    #[error("{0}")]
    Parse(#[from] io::ParseError),
    /// A run diverged (exit 3).
    #[error("{0}")]
    Divergence(vmprox_core::SolverError),
    /// Invalid configuration (exit 4).
    #[error("invalid configuration: {0}")]
    Config(String),
    /// A verification property failed (exit 5).
    #[error("property failed: {0}")]
    Verify(String),
    /// Output-side IO failure (exit 1).
    #[error("io error: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Divergence(_) => 3,
            CliError::Config(_) => 4,
            CliError::Verify(_) => 5,
            CliError::Output(_) => 1,
        }
    }
}

/// Environment variable naming the dataset root directory.
pub const DATA_DIR_ENV: &str = "VMPROX_DATA_DIR";
