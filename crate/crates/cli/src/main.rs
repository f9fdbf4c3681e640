use std::process::ExitCode;

use clap::Parser;
use polewave_cli::app::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("polewave: {f}");
            f.exit_code()
        }
    }
}
