mod config;
mod svg;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use career_lab::Error;

use crate::config::Cli;

/// Exit codes: 0 success, 1 config error, 2 divergent regime,
/// 3 verification failure.
fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    match config::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn exit_code_for(err: &config::CliError) -> u8 {
    match err {
        config::CliError::Config(_) | config::CliError::Io(_) => 1,
        config::CliError::Model(Error::DivergentSeries) => 2,
        config::CliError::Model(_) => 1,
        config::CliError::VerificationFailed => 3,
    }
}
