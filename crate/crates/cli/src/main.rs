use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use svfractal_cli::{run_file, Command};

/// Set-valued fractal functions: construction, approximation and graph
/// dimension experiments.
#[derive(Debug, Parser)]
#[command(name = "svfractal", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Directory for CSV outputs.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Seed for randomized checks; overrides the config's `seed`.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run_file(args.command, &args.config, &args.out, args.seed) {
        Ok(report) => {
            println!("{report}");
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
