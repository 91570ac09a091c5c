//! `angio`: severity estimation, evaluation and augmentation from the command line.

mod commands;
mod error;
mod io;
mod json;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::CliError;
use crate::report::RunReport;

#[derive(Debug, Parser)]
#[command(name = "angio", version, about = "Coronary lesion severity, evaluation and augmentation")]
struct Cli {
    /// Worker threads for batch work (default: all cores).
    #[arg(long, global = true, env = "ANGIO_JOBS")]
    jobs: Option<usize>,

    /// Write a run report (inputs, outputs, digests, wall time) to this JSON file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    Severity(commands::severity::Args),
    EvalDetect(commands::detect::Args),
    EvalSeg(commands::seg::Args),
    Augment(commands::augment::Args),
    Agree(commands::agree::Args),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Severity(_) => "severity",
            Command::EvalDetect(_) => "eval-detect",
            Command::EvalSeg(_) => "eval-seg",
            Command::Augment(_) => "augment",
            Command::Agree(_) => "agree",
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut report = RunReport::start(cli.command.name());
    let outcome = angio_core::par::with_jobs(cli.jobs, || match &cli.command {
        Command::Severity(a) => commands::severity::run(a, &mut report),
        Command::EvalDetect(a) => commands::detect::run(a, &mut report),
        Command::EvalSeg(a) => commands::seg::run(a, &mut report),
        Command::Augment(a) => commands::augment::run(a, &mut report),
        Command::Agree(a) => commands::agree::run(a, &mut report),
    });
    // Undefined metrics still produce output, so the report is written for them too.
    if let (Some(path), Ok(()) | Err(CliError::Undefined(_))) = (&cli.report, &outcome) {
        report.finish(path)?;
    }
    outcome
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("angio: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
