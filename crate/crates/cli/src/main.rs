mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

/// A failed invocation, carrying its exit status.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, missing files or malformed arguments (exit 2).
    Usage(String),
    /// The input or a checked hypothesis was rejected (exit 1).
    Rejected(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Rejected(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Rejected(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("tridyn: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
