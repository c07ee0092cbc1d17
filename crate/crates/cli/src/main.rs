//! `vmo-lab`: experiment runner for the verification laboratory.
//!
//! Every CSV starts with `# config_digest=<sha256>` followed by a header row.
//! Exit status is 0 on success, 1 on invalid input or I/O failure and 3 when
//! the run completed but some checked inequality failed.

mod commands;
mod config;
mod output;
mod snapshot;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use commands::Status;

#[derive(Debug, Parser)]
#[command(name = "vmo-lab", version, about = "Partially VMO verification laboratory")]
struct Cli {
    /// JSON object with the subcommand parameters; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Distribution and norm inequalities on seeded random triples
    FsVerify(commands::FsVerify),
    /// Example coefficient snapshot
    FieldGen(commands::FieldGen),
    /// Best-direction oscillation over sampled balls
    Oscillation(commands::Oscillation),
    /// Oscillation bound of the example over all dyadic squares
    ExampleBound(commands::ExampleBound),
    /// Implied constants of the a priori estimate across lambda
    AprioriSweep(commands::AprioriSweep),
    /// Discrete convergence of the lifting identity
    AgmonCheck(commands::AgmonCheck),
    /// Local estimate fits for compactly supported functions
    LocalProbe(commands::LocalProbe),
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("VMO_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("VMO_LAB_THREADS={raw:?} is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")
}

fn run(cli: &Cli) -> Result<Status> {
    configure_threads()?;
    let cfg = cli.config.as_deref();
    match &cli.command {
        Command::FsVerify(a) => commands::fs_verify(a, cfg),
        Command::FieldGen(a) => commands::field_gen(a, cfg),
        Command::Oscillation(a) => commands::oscillation(a, cfg),
        Command::ExampleBound(a) => commands::example_bound(a, cfg),
        Command::AprioriSweep(a) => commands::apriori_sweep(a, cfg),
        Command::AgmonCheck(a) => commands::agmon_check(a, cfg),
        Command::LocalProbe(a) => commands::local_probe(a, cfg),
    }
}

fn one_line(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let first = e.to_string();
            let line = first.lines().next().unwrap_or("invalid arguments");
            eprintln!("{}", one_line(line));
            return ExitCode::FAILURE;
        }
    };
    match run(&cli) {
        Ok(Status::Done(msg)) => {
            println!("{msg}");
            ExitCode::SUCCESS
        }
        Ok(Status::ChecksFailed(msg)) => {
            eprintln!("checks failed: {msg}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {}", one_line(&format!("{e:#}")));
            ExitCode::FAILURE
        }
    }
}
