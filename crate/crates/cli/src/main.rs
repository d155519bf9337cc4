//! `altproj` command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Context;
use config::{ExperimentConfig, ModeSpec};
use error::CliError;

#[derive(Parser)]
#[command(name = "altproj", version, about = "Minimum-time consensus by alternating projections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the consensus point and time.
    Solve(Args),
    /// Solve, then sample every agent's bang-bang trajectory.
    Simulate(Args),
    /// Solve and check the result against brute-force oracles.
    Verify(Args),
}

#[derive(clap::Args)]
struct Args {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override the config's solver mode.
    #[arg(long, value_enum)]
    mode: Option<ModeSpec>,
    /// Suppress summaries and tables.
    #[arg(long)]
    quiet: bool,
}

type Handler = fn(&Context) -> Result<(), CliError>;

fn run(cli: Cli) -> Result<(), CliError> {
    let (args, cmd): (&Args, Handler) = match &cli.command {
        Command::Solve(a) => (a, commands::solve),
        Command::Simulate(a) => (a, commands::simulate),
        Command::Verify(a) => (a, commands::verify),
    };
    let cfg = ExperimentConfig::load(&args.config)?;
    let mode = args.mode.unwrap_or(cfg.mode);
    cmd(&Context { cfg, mode, quiet: args.quiet })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
