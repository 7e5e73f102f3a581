use std::process::ExitCode;

use clap::Parser;
use immersion_cli::{run, Cli, Status};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    match run(&cli, &mut stdout) {
        Ok(status) => {
            if let Status::NotFound(why) = &status {
                eprintln!("not found: {why}");
            }
            ExitCode::from(status.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
