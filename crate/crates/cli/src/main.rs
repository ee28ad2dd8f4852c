mod commands;
mod config;
mod error;
mod output;

use std::process;

use clap::{Parser, Subcommand};

use commands::{AllocateArgs, GcltArgs, PdfArgs, SampleArgs, TceArgs};
use error::CliError;
use output::{emit, OutputArgs};

/// Stable-law densities, tail conditional expectations and capital
/// allocation for heavy-tailed portfolios.
#[derive(Parser)]
#[command(name = "stablecap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the density on points or a grid
    Pdf(PdfArgs),
    /// Value-at-risk and tail conditional expectation
    Tce(TceArgs),
    /// Allocate the portfolio TCE across lines
    Allocate(AllocateArgs),
    /// Distance of simulated portfolio sums to their stable approximation
    GcltCheck(GcltArgs),
    /// Draw samples from a stable law or a portfolio approximation
    Sample(SampleArgs),
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let verification = match &cli.command {
        Command::Pdf(a) => {
            emit(&commands::pdf(a)?, &cli.output)?;
            None
        }
        Command::Tce(a) => {
            emit(&commands::tce(a)?, &cli.output)?;
            None
        }
        Command::Allocate(a) => {
            let (table, failure) = commands::allocate_cmd(a)?;
            emit(&table, &cli.output)?;
            failure
        }
        Command::GcltCheck(a) => {
            emit(&commands::gclt_check(a)?, &cli.output)?;
            None
        }
        Command::Sample(a) => {
            emit(&commands::sample_cmd(a)?, &cli.output)?;
            None
        }
    };
    match verification {
        Some(msg) => Err(CliError::Verification(msg)),
        None => Ok(()),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("STABLECAP_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    if let Err(e) = run(&cli) {
        eprintln!("error: {e}");
        process::exit(e.exit_code());
    }
}
