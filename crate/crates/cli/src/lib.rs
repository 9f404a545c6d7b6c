//! Batch front end for svfractal experiments: reads a JSON config, runs
//! one command, writes CSV tables atomically and returns a report.

pub mod check;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod report;

use std::path::Path;
use std::time::Instant;

pub use config::{Command, ExperimentConfig};
pub use error::{CliError, Result};
pub use report::RunReport;

/// Runs `cmd` on an already parsed config. `seed` feeds the randomized
/// check suites and falls back to the config's `seed`, then 0.
pub fn run(cmd: Command, cfg: &ExperimentConfig, out_dir: &Path, seed: Option<u64>) -> Result<RunReport> {
    cfg.check_command(cmd)?;
    let start = Instant::now();
    let mut out = output::OutputDir::create(out_dir)?;
    let mut report = match cmd {
        Command::Build => commands::run_build(cfg, &mut out)?,
        Command::Dimension => commands::run_dimension(cfg, &mut out)?,
        Command::Approx => commands::run_approx(cfg, &mut out)?,
        Command::Ifs => commands::run_ifs(cfg, &mut out)?,
        Command::Check => check::run_check(cfg, seed.or(cfg.seed).unwrap_or(0), &mut out)?,
    };
    report.wall_time = start.elapsed();
    report.files = out.into_manifest();
    Ok(report)
}

/// Loads the config at `config` and runs `cmd`.
pub fn run_file(cmd: Command, config: &Path, out_dir: &Path, seed: Option<u64>) -> Result<RunReport> {
    run(cmd, &ExperimentConfig::load(config)?, out_dir, seed)
}
