//! `mgcert`: two-grid bounds, multilevel certificates, parameter sweeps and
//! a randomized invariant suite from the command line.
//!
//! Exit codes: 0 success, 1 a reported check failed, 2 bad configuration or
//! input, 3 outside the range where the bounds apply, 4 an internal
//! cross-check failed, 5 the multilevel problem is in the trivial case.

mod args;
mod commands;
mod problem;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use mgcert_core::Error;

use args::{expand_config, Cli, Command};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => match e {
                Error::OutOfTheoryRange(_)
                | Error::DegeneratePencil { .. }
                | Error::BadBracket { .. }
                | Error::NotAConvergent { .. } => 3,
                Error::CrossCheckFailed { .. } | Error::SimilarityNotSymmetric { .. } | Error::NoConvergence { .. } => {
                    4
                }
                Error::NontrivialCaseViolated { .. } => 5,
                _ => 2,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => f.write_str(msg),
            CliError::Core(e) => e.fmt(f),
        }
    }
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let outcome = match &cli.command {
        Command::Analyze(a) => commands::analyze(a)?,
        Command::MgCertify(a) => commands::mg_certify(a)?,
        Command::SweepOmega(a) => commands::sweep_omega(a)?,
        Command::SweepAlpha(a) => commands::sweep_alpha(a)?,
        Command::Verify(a) => commands::verify(a)?,
    };
    match &cli.command.args().out {
        Some(path) => std::fs::write(path, &outcome.body).map_err(|e| CliError::Core(e.into()))?,
        None => std::io::stdout()
            .write_all(outcome.body.as_bytes())
            .map_err(|e| CliError::Core(e.into()))?,
    }
    Ok(outcome.ok)
}

fn main() -> ExitCode {
    let argv = match expand_config(std::env::args_os().collect()) {
        Ok(argv) => argv,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("check failed; see output");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
