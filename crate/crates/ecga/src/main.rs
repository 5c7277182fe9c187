use std::process::ExitCode;

use clap::Parser;

use ecga::cli::{run, Cli};
use ecga::Error;

fn main() -> ExitCode {
    // clap itself exits with code 2 on flag parse errors.
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::InvalidArgument(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
