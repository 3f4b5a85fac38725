use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use twolayer_experiments::{exit, run, Command, Config, RunOptions};

/// Optimal two-layer dividend strategies: solve, value, simulate, sweep,
/// converge and check experiments driven by a TOML config.
#[derive(Debug, Parser)]
#[command(name = "twolayer", version)]
struct Cli {
    /// One of: solve, value, simulate, sweep, converge, check.
    command: Command,
    /// Path to the experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output.directory`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed for Monte Carlo (overrides `simulate.seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::CONFIG } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("config error: --threads must be positive");
            return ExitCode::from(exit::CONFIG as u8);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: could not size thread pool: {e}");
        }
    }
    let result = Config::from_path(&cli.config)
        .and_then(|cfg| run(cli.command, &cfg, &RunOptions { out: cli.out, seed: cli.seed }));
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{e}");
            if matches!(e, twolayer_experiments::AppError::Numerical(twolayer_core::Error::NonDistinctRoots { .. })) {
                eprintln!("hint: perturb q slightly to separate the roots");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
