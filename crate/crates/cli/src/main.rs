#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;
mod report;
mod svg;

use std::process::ExitCode;

use clap::Parser;

use crate::config::{Cli, CommandKind, ExperimentConfig};
use crate::error::CliError;

fn run(cli: Cli) -> Result<bool, CliError> {
    let (kind, flags) = cli.command.split();
    let cfg = ExperimentConfig::resolve(kind, flags)?;
    let outcome = match cfg.command {
        CommandKind::Eval => commands::eval(&cfg)?,
        CommandKind::VerifyMoments => commands::verify(&cfg)?,
        CommandKind::CheckBounds => commands::check_bounds(&cfg)?,
        CommandKind::Converge => commands::converge(&cfg)?,
    };
    output::emit(cfg.out_dir.as_deref(), &outcome.artifacts)?;
    eprint!("{}", outcome.summary);
    Ok(outcome.failed)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            eprintln!("baskakov: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
