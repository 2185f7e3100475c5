//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::HarnessError;

#[derive(Debug, Parser)]
#[command(
    name = "manet",
    about = "Buffer-limited two-hop relay MANET toolkit: exact theory, slotted simulation, \
             validation, and parameter sweeps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the closed-form model for one scenario
    Theory(RunArgs),
    /// Run the slotted Monte Carlo simulator for one scenario
    Simulate(RunArgs),
    /// Run theory and simulation on identical scenarios and gate on agreement
    Validate(ValidateArgs),
    /// Evaluate a grid of scenarios, one CSV row per swept value
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MacArg {
    Ls,
    Ec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MobilityArg {
    Iid,
    Rw,
}

/// Flags shared by every subcommand. Values from `--config` are applied
/// first; explicit flags override them.
#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// JSON config file with NetworkParams/experiment fields
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write output here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format (default: json for theory/simulate, csv for validate/sweep)
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Base random seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Slots per replication
    #[arg(long)]
    pub slots: Option<u64>,
    /// Number of replications
    #[arg(long)]
    pub reps: Option<u32>,
    /// Relative-error gate for validate
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Leading fraction of slots discarded as warm-up
    #[arg(long)]
    pub warmup_fraction: Option<f64>,

    /// Number of nodes
    #[arg(long)]
    pub n: Option<u32>,
    /// Cells per torus side
    #[arg(long)]
    pub m: Option<u32>,
    /// Source buffer size (packets)
    #[arg(long)]
    pub bs: Option<u32>,
    /// Relay buffer size (packets)
    #[arg(long)]
    pub br: Option<u32>,
    /// Packet generating probability per slot
    #[arg(long)]
    pub lambda_s: Option<f64>,
    /// Relay-overflow feedback on or off
    #[arg(long)]
    pub feedback: Option<bool>,
    /// MAC scheme
    #[arg(long, value_enum)]
    pub mac: Option<MacArg>,
    /// EC transmission-range parameter
    #[arg(long)]
    pub nu: Option<u32>,
    /// EC guard factor
    #[arg(long)]
    pub delta: Option<f64>,
    /// Mobility model
    #[arg(long, value_enum)]
    pub mobility: Option<MobilityArg>,

    /// Sweep this NetworkParams field (n, m, bs, br, lambda_s, nu, delta)
    #[arg(long)]
    pub sweep: Option<String>,
    /// Comma-separated sweep values
    #[arg(long)]
    pub values: Option<String>,
    /// Node/cell density held fixed while sweeping n (cells = n / density)
    #[arg(long)]
    pub density: Option<f64>,
}

impl RunArgs {
    pub fn output(&self) -> Result<crate::output::Output, HarnessError> {
        crate::output::Output::new(self.out.clone(), self.format)
    }
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Emit rows for both feedback modes regardless of the configured one
    #[arg(long)]
    pub both_modes: bool,
    /// Self-test hook: scale theory throughput/delay before comparing
    #[arg(long, hide = true, default_value_t = 1.0)]
    pub theory_scale: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Also simulate every sweep point and add simulation columns
    #[arg(long)]
    pub with_sim: bool,
}
