//! `fparadox`: friendship paradox gaps for weighted graphs.
//!
//! Exit codes: 0 success, 1 bad input, 2 a gap disagreed with its sign rule.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod analyze;
mod generate;
mod output;
mod pipeline;
mod simulate;
mod verify;

#[derive(Parser)]
#[command(name = "fparadox", version, about = "Friendship paradox gaps on weighted graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gaps, correlations and sign checks for one edge list
    Analyze(analyze::Args),
    /// Attribute-condition sweep over random graphs
    Simulate(simulate::Args),
    /// Homophily attributes and weights from node metadata
    Pipeline(pipeline::Args),
    /// Randomized property checks against the brute-force oracle
    Verify(verify::Args),
    /// Write random graphs or a synthetic campus corpus to disk
    #[command(subcommand)]
    Generate(generate::Command),
}

pub enum Failure {
    Input(anyhow::Error),
    Violation(String),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

pub type CmdResult = Result<(), Failure>;

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("PARADOX_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| anyhow::anyhow!("PARADOX_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = configure_threads().map_err(Failure::Input).and_then(|()| match cli.command {
        Command::Analyze(args) => analyze::run(args),
        Command::Simulate(args) => simulate::run(args),
        Command::Pipeline(args) => pipeline::run(args),
        Command::Verify(args) => verify::run(args),
        Command::Generate(cmd) => generate::run(cmd),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Violation(msg)) => {
            eprintln!("consistency violation: {msg}");
            ExitCode::from(2)
        }
    }
}
