//! `mr-hetero`: analyse summary-level MR data and run the simulation benchmark.
//!
//! Exit codes: 0 success, 2 invalid input or arguments, 3 numerical failure,
//! 1 anything else (e.g. an unwritable output directory).

mod analyze;
mod manifest;
mod simulate;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mr_hetero::MrError;

#[derive(Debug, Parser)]
#[command(name = "mr-hetero", version, about = "Heterogeneity-based outlier detection for Mendelian randomisation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate causal effects and flag outlying instruments in a summary dataset.
    Analyze(analyze::AnalyzeArgs),
    /// Run a simulation setting and write its metrics table.
    Simulate(simulate::SimulateArgs),
}

fn exit_code(err: &anyhow::Error) -> (u8, String) {
    match err.downcast_ref::<MrError>() {
        Some(e) if e.is_numerical() => (3, e.to_string()),
        Some(e) => (2, e.to_string()),
        None => (1, format!("{err:#}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze(a) => analyze::run(a),
        Command::Simulate(s) => simulate::run(s),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (code, msg) = exit_code(&e);
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
