//! `tsi-lab`: build truncated iterated-map states, compute their photon
//! statistics, synthesize beam-splitter generation plans, evaluate
//! detector-loss fidelities, and run the reference validation suite.

mod commands;
mod config;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "tsi-lab", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a truncated state and emit its amplitudes
    State(StateArgs),
    /// Photon-statistics sweep over truncation N = 0..n
    Sweep(SweepArgs),
    /// Husimi Q function on a phase-space grid
    Husimi(HusimiArgs),
    /// Synthesize the generation plan (roots, alphas, success probability)
    Engineer(EngineerArgs),
    /// Generation fidelity under inefficient detectors
    Fidelity(FidelityArgs),
    /// Run the built-in reference reproduction checks
    Validate(ValidateArgs),
}

#[derive(Args, Clone, Default)]
struct MapOpts {
    /// Generating map
    #[arg(long, value_enum)]
    map: Option<MapArg>,
    /// Control parameter mu (ignored by the doubling map)
    #[arg(long)]
    mu: Option<f64>,
    /// Seed C0: real ("0.3"), complex ("0.1+0.2i"), or exact rational
    /// ("3/10", doubling only)
    #[arg(long)]
    seed: Option<String>,
    /// Largest Fock index N
    #[arg(long, short)]
    n: Option<usize>,
    /// Config file with "key = value" lines; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct OutputOpts {
    /// Output format
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Write to this path (atomically) instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Emit complex values as magnitude/phase instead of re/im
    #[arg(long)]
    polar: bool,
    /// Suppress the generation-time metadata line/field
    #[arg(long)]
    no_meta: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MapArg {
    Doubling,
    Logistic,
    Quadratic,
    Sine,
    Exponential,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum, Default)]
enum FormatArg {
    #[default]
    Csv,
    Json,
}

#[derive(Args)]
struct StateArgs {
    #[command(flatten)]
    map: MapOpts,
    #[command(flatten)]
    out: OutputOpts,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    map: MapOpts,
    #[command(flatten)]
    out: OutputOpts,
}

#[derive(Args)]
struct HusimiArgs {
    #[command(flatten)]
    map: MapOpts,
    #[command(flatten)]
    out: OutputOpts,
    /// Symmetric window half-width: grid spans [-w, w]^2
    #[arg(long, default_value_t = 6.0)]
    window: f64,
    /// Grid points per axis
    #[arg(long, default_value_t = 121)]
    resolution: usize,
}

#[derive(Args)]
struct EngineerArgs {
    #[command(flatten)]
    map: MapOpts,
    #[command(flatten)]
    out: OutputOpts,
    /// Beam-splitter amplitude transmittance
    #[arg(long, short)]
    transmittance: Option<f64>,
    /// Root order as a comma-separated permutation of the canonical order,
    /// e.g. "1,0,4,3,2"
    #[arg(long)]
    root_order: Option<String>,
    /// Also scan for the probability-optimal transmittance
    #[arg(long)]
    optimize_t: bool,
    /// Scan range lower edge
    #[arg(long, default_value_t = 0.78)]
    t_min: f64,
    /// Scan range upper edge
    #[arg(long, default_value_t = 0.96)]
    t_max: f64,
    /// Scan grid points
    #[arg(long, default_value_t = 24)]
    t_grid: usize,
    /// Refinement tolerance on T
    #[arg(long, default_value_t = 1e-4)]
    t_tol: f64,
    /// Starting Fock-space cutoff for the convergence check (default:
    /// automatic; also settable via TSI_LAB_CUTOFF)
    #[arg(long)]
    cutoff: Option<usize>,
}

#[derive(Args)]
struct FidelityArgs {
    #[command(flatten)]
    map: MapOpts,
    #[command(flatten)]
    out: OutputOpts,
    /// Beam-splitter amplitude transmittance
    #[arg(long, short)]
    transmittance: Option<f64>,
    /// Detector efficiencies, comma-separated ("0.99,0.95,0.90")
    #[arg(long)]
    eta: Option<String>,
    /// Efficiency grid "lo:hi:steps" (inclusive)
    #[arg(long)]
    eta_grid: Option<String>,
    /// Root order permutation (see `engineer`)
    #[arg(long)]
    root_order: Option<String>,
    /// Starting Fock-space cutoff for the convergence check
    #[arg(long)]
    cutoff: Option<usize>,
}

#[derive(Args)]
struct ValidateArgs {
    /// List the criteria without running them
    #[arg(long)]
    list: bool,
    /// Run only this criterion (1-7)
    #[arg(long)]
    criterion: Option<usize>,
}

/// Process-level error classes mapped to exit codes: usage/precondition
/// errors exit 2, internal/numerical failures exit 1, reference-validation
/// failures exit 3.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Internal(String),
    Validation(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 1,
            CliError::Validation(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Internal(m) | CliError::Validation(m) => {
                f.write_str(m)
            }
        }
    }
}

impl From<tsi_lab::Error> for CliError {
    fn from(e: tsi_lab::Error) -> Self {
        use tsi_lab::Error::*;
        match e {
            Domain(_) | DegenerateDegree | UndefinedStatistic(_) => CliError::Usage(e.to_string()),
            ZeroNorm | CutoffInsufficient { .. } | RootFinder { .. } => {
                CliError::Internal(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(format!("io: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::State(args) => commands::state(args),
        Command::Sweep(args) => commands::sweep(args),
        Command::Husimi(args) => commands::husimi(args),
        Command::Engineer(args) => commands::engineer(args),
        Command::Fidelity(args) => commands::fidelity(args),
        Command::Validate(args) => commands::validate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
