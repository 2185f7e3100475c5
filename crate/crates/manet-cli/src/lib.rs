//! Experiment harness around `manet-core`: scenario configuration from flags
//! or a JSON file, the four subcommands, and CSV/JSON emission.
//!
//! Exit codes: 0 success, 1 tolerance failure, 2 configuration error,
//! 3 numerical non-convergence.

use std::process::ExitCode;

pub mod cli;
pub mod commands;
pub mod config;
pub mod output;

use manet_core::ModelError;

/// Harness-level failure, carrying its process exit code.
#[derive(Debug)]
pub enum HarnessError {
    /// Bad flags, bad config file, or invalid parameter combinations.
    Config(String),
    /// The analytic engine failed to converge.
    NonConvergence(String),
    /// Filesystem trouble reading or writing artifacts.
    Io(String),
}

impl HarnessError {
    pub fn report(self) -> ExitCode {
        let (msg, code) = match self {
            HarnessError::Config(m) => (m, 2),
            HarnessError::NonConvergence(m) => (m, 3),
            HarnessError::Io(m) => (m, 2),
        };
        eprintln!("error: {msg}");
        ExitCode::from(code)
    }
}

impl From<ModelError> for HarnessError {
    fn from(err: ModelError) -> Self {
        match err {
            ModelError::FixedPointDiverged { .. } => HarnessError::NonConvergence(err.to_string()),
            other => HarnessError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(err: std::io::Error) -> Self {
        HarnessError::Io(err.to_string())
    }
}

/// Dispatches a parsed command line.
pub fn run(cli: cli::Cli) -> Result<ExitCode, HarnessError> {
    match cli.command {
        cli::Command::Theory(args) => {
            let cfg = config::resolve(&args)?;
            commands::theory(&cfg, &args.output()?)
        }
        cli::Command::Simulate(args) => {
            let cfg = config::resolve(&args)?;
            commands::simulate(&cfg, &args.output()?)
        }
        cli::Command::Validate(ref args) => {
            let cfg = config::resolve(&args.run)?;
            commands::validate(
                &cfg,
                args.both_modes,
                args.theory_scale,
                &args.run.output()?,
            )
        }
        cli::Command::Sweep(ref args) => {
            let cfg = config::resolve(&args.run)?;
            commands::sweep(&cfg, args.with_sim, &args.run.output()?)
        }
    }
}
