use std::process::ExitCode;

use clap::Parser;
use netentropy_cli::args::Cli;

fn main() -> ExitCode {
    match netentropy_cli::run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
