use std::process::ExitCode;

use clap::Parser;

use manet_cli::cli::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match manet_cli::run(cli) {
        Ok(code) => code,
        Err(err) => err.report(),
    }
}
