mod args;
mod commands;
mod report;
mod stats;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use report::Failure;

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Cluster(a) => commands::cluster(a.into()),
        Command::Select(a) => commands::select(a.into()),
        Command::Evaluate(a) => commands::evaluate(a.into()),
        Command::Stats(a) => stats::run(a.into()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return Failure::usage("usage", e.to_string()).emit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.emit(),
    }
}
