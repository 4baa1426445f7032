mod args;
mod commands;
mod error;
mod input;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliError;

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Analyze(a) => commands::analyze(a, cli.format),
        Command::Law(a) => commands::law(a, cli.format),
        Command::Series(a) => commands::series(a, cli.format),
        Command::Simulate(a) => commands::simulate(a),
        Command::Reproduce(a) => commands::reproduce_cmd(a, cli.format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Help and version requests are not errors.
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Output(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("binlaw: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
