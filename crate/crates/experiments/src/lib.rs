//! Configuration-driven experiments on optimal two-layer dividend
//! strategies: solving, valuation tables, Monte Carlo runs, parameter
//! sweeps, convergence studies and a property check suite. Every command
//! writes CSV files into an output directory.

pub mod checks;
pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use twolayer_core::Error as CoreError;

pub use config::{Command, Config};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const NUMERICAL: i32 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(CoreError),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidPhaseType(_)
            | CoreError::SubordinatorPath { .. }
            | CoreError::InvalidParameter(_)
            | CoreError::InvalidStrategy { .. }
            | CoreError::NegativeStart(_)
            | CoreError::InvalidConfig(_) => AppError::Config(e.to_string()),
            other => AppError::Numerical(other),
        }
    }
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) => exit::CONFIG,
            AppError::Numerical(_) => exit::NUMERICAL,
            // unwritable output is an environment problem, reported like bad input
            AppError::Io(_) => exit::CONFIG,
        }
    }
}

/// Command-line overrides.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

/// Runs `command` on a parsed config and returns the exit code.
pub fn run(command: Command, cfg: &Config, opts: &RunOptions) -> Result<i32, AppError> {
    cfg.check_command(command)?;
    let dir = opts
        .out
        .clone()
        .or_else(|| cfg.output.directory.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let sink = output::Sink::new(dir, cfg.output.precision)?;
    match command {
        Command::Solve => commands::solve(cfg, &sink),
        Command::Value => commands::value(cfg, &sink),
        Command::Simulate => commands::simulate(cfg, &sink, opts.seed),
        Command::Sweep => commands::sweep(cfg, &sink),
        Command::Converge => commands::converge(cfg, &sink),
        Command::Check => commands::check(cfg, &sink, opts.seed),
    }
}
