use std::io;
use std::process::ExitCode;

use clap::Parser;
use kg_bohm::cli::Cli;
use kg_bohm::commands::{self, Status};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = io::stdout();
    let mut stderr = io::stderr();
    match commands::run(&cli, &mut stdout, &mut stderr) {
        Ok(Status::Success) => ExitCode::SUCCESS,
        Ok(Status::Mismatch) => {
            eprintln!("verification failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
