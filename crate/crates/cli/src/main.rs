//! `fraclen`: command-line front end for the fractional-length estimators.

mod args;
mod commands;
mod report;
mod spec;

use std::process::ExitCode;

use anyhow::Result;
use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use args::{Cli, Command, RunArgs};
use report::{unix_seconds, write_outputs, Report};

/// Numerical failures exit with 2; bad input and I/O errors exit with 1.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<fraclen_core::Error>() {
        Some(
            fraclen_core::Error::Degenerate(_)
            | fraclen_core::Error::Quadrature { .. }
            | fraclen_core::Error::NonFinite
            | fraclen_core::Error::Numerical(_),
        ) => 2,
        _ => 1,
    }
}

fn run_args(command: &Command) -> &RunArgs {
    match command {
        Command::Length(a) => &a.run,
        Command::LimitSweep(a) => &a.run,
        Command::Curvature(a) | Command::ElResidual(a) => &a.run,
        Command::Classify(a) => &a.run,
        Command::VerifyJacobians(a) => &a.run,
        Command::VerifyLemmaInt(a) => &a.run,
    }
}

fn execute(command: &Command) -> Result<Report> {
    match command {
        Command::Length(a) => commands::length(a),
        Command::LimitSweep(a) => commands::limit(a),
        Command::Curvature(a) => commands::curvature(a),
        Command::ElResidual(a) => commands::residual(a),
        Command::Classify(a) => commands::classify(a),
        Command::VerifyJacobians(a) => commands::jacobians(a),
        Command::VerifyLemmaInt(a) => commands::lemma_int(a),
    }
}

fn run(cli: Cli) -> Result<()> {
    let started = unix_seconds();
    let report = execute(&cli.command)?;
    let run = run_args(&cli.command);
    match &run.output {
        Some(path) => {
            let meta = json!({
                "version": report::VERSION,
                "workers": run.workers,
                "started_unix": started,
                "finished_unix": unix_seconds(),
                "argv": std::env::args().collect::<Vec<_>>(),
            });
            write_outputs(path, &report, &meta)?;
            print!("{}", report.render_summary());
        }
        None => {
            print!("{}", report.render());
            eprint!("{}", report.render_summary());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    if let Some(workers) = run_args(&cli.command).workers {
        if workers == 0 {
            eprintln!("error: --workers must be positive");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
