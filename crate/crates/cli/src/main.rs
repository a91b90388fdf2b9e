//! `dyadic-ivp` command-line driver.
//!
//! Exit codes: 0 success, 1 configuration or parse error, 2 hypothesis
//! violation, 3 capacity error, 4 property failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

#[derive(Debug, Parser)]
#[command(
    name = "dyadic-ivp",
    version,
    about = "Certified dyadic Euler solver for scalar IVPs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve at a tolerance (or fixed level) and write a t,x,bound table.
    Solve(RunConfig),
    /// Compare consecutive levels against the C/2^m bound.
    Converge(RunConfig),
    /// Run every runtime property check at a fixed level.
    Verify(RunConfig),
    /// Compare against an independent RK4 integration.
    Compare(RunConfig),
}

#[derive(Debug, Args)]
pub struct RunConfig {
    /// Problem file (JSON).
    #[arg(long)]
    pub problem: PathBuf,
    /// Target tolerance for the certified evaluation bound.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=40))]
    pub level: Option<u32>,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=40))]
    pub min_level: Option<u32>,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=40))]
    pub max_level: Option<u32>,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of equal intervals in the solve table.
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                commands::EXIT_CONFIG
            } else {
                0
            });
        }
    };
    let code = match cli.command {
        Command::Solve(cfg) => commands::solve(&cfg),
        Command::Converge(cfg) => commands::converge(&cfg),
        Command::Verify(cfg) => commands::verify(&cfg),
        Command::Compare(cfg) => commands::compare(&cfg),
    };
    ExitCode::from(code)
}
