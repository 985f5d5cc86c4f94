//! `spinorbit`: correlations, sweeps, scatter data, transverse profiles and
//! tomography Monte Carlo for spin-orbit maximally discordant states.
//!
//! Exit codes: 0 success, 1 I/O or replay mismatch, 2 bad arguments,
//! 3 degenerate state (nothing reaches the detector).

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use spinorbit_core::Error as CoreError;

#[derive(Debug, Parser, Serialize)]
#[command(name = "spinorbit", version, about = "Spin-orbit discord simulations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Correlation report (JSON) of one state.
    Correlations(CorrelationsArgs),
    /// Correlations along a parameter grid (CSV).
    Sweep(SweepArgs),
    /// Discord vs classical correlation samples of the rank-2 and rank-3 families (CSV).
    Scatter(ScatterArgs),
    /// Transverse detection-probability map (PGM or CSV).
    Profile(ProfileArgs),
    /// Simulated tomography with analysis-stage noise (JSON).
    Tomography(TomographyArgs),
    /// Re-run a command from its manifest and compare outputs.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Rank2,
    Rank3,
    Mdms,
}

/// Where the state comes from: a closed-form family, the preparation
/// circuit builder, or a circuit file.
#[derive(Debug, Args, Serialize)]
pub struct StateArgs {
    #[arg(long, value_enum, conflicts_with_all = ["circuit", "builder"])]
    pub family: Option<FamilyArg>,
    /// Simulate the three-source preparation circuit (uses --theta, --phi, --m, --eps).
    #[arg(long, conflicts_with = "circuit")]
    pub builder: bool,
    /// Circuit description file.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, default_value_t = 0.5)]
    pub m: f64,
    #[arg(long)]
    pub eps: Option<f64>,
    /// HWP1 angle in degrees (builder only).
    #[arg(long, default_value_t = 22.5)]
    pub theta: f64,
    /// Interferometer phase in degrees (builder only).
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct OptimizerArgs {
    #[arg(long, default_value_t = 64)]
    pub grid_theta: usize,
    #[arg(long, default_value_t = 64)]
    pub grid_phi: usize,
    /// Skip the simplex refinement after the grid search.
    #[arg(long)]
    pub no_refine: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct NoiseArgs {
    /// Wave-plate angle error half-range, degrees.
    #[arg(long, default_value_t = 1.0)]
    pub hwp_jitter: f64,
    #[arg(long, default_value_t = 0.48)]
    pub bs_r: f64,
    #[arg(long, default_value_t = 0.49)]
    pub bs_t: f64,
    #[arg(long, default_value_t = 100)]
    pub runs: usize,
    #[arg(long, env = "SPINORBIT_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Manifest path for runs that write to standard output.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CorrelationsArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VarArg {
    Eps,
    P,
    M,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, default_value_t = 0.5)]
    pub m: f64,
    /// Fixed ε when sweeping another variable.
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    #[arg(long = "var", value_enum, default_value_t = VarArg::Eps)]
    pub variable: VarArg,
    #[arg(long, default_value_t = 0.0)]
    pub from: f64,
    #[arg(long, default_value_t = 1.0)]
    pub to: f64,
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    /// Add Monte Carlo error bars from the noisy tomography model.
    #[arg(long)]
    pub noise: bool,
    #[command(flatten)]
    pub noise_config: NoiseArgs,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionArg {
    Mdms,
    Full,
}

#[derive(Debug, Args, Serialize)]
pub struct ScatterArgs {
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    /// Parameter region of the rank-3 series.
    #[arg(long, value_enum, default_value_t = RegionArg::Mdms)]
    pub rank3_region: RegionArg,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MapFormat {
    Pgm,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum PolArg {
    H,
    V,
}

#[derive(Debug, Args, Serialize)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, default_value_t = 4.0)]
    pub half_width: f64,
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
    #[arg(long, default_value_t = 1.0)]
    pub waist: f64,
    #[arg(long, value_enum, default_value_t = MapFormat::Pgm)]
    pub format: MapFormat,
    /// Only the light behind a polarizer set to H or V.
    #[arg(long, value_enum)]
    pub pol: Option<PolArg>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct TomographyArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Rewrite the output files instead of only comparing them.
    #[arg(long)]
    pub write: bool,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(CoreError),
    Io(std::io::Error),
    Mismatch(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(CoreError::DegenerateState(_)) => 3,
            CliError::Core(_) => 2,
            CliError::Io(_) | CliError::Mismatch(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Mismatch(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o: {e}"),
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::execute(&cli, &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spinorbit: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
