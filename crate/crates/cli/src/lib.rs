//! Command-line front end for epipolar scale recovery.
//!
//! Exit codes: 0 when the scales are uniquely determined (or the command
//! succeeded), 2 when the system admits several solutions or no exact one,
//! 1 on I/O or validation failures.

pub mod commands;
pub mod error;
pub mod io;

use clap::{Args, Parser, Subcommand};
use episcale::synth::Protocol;
use episcale::{BasisKind, TreeSearch};
use std::path::PathBuf;

pub use error::{CliError, CliResult};

/// Default `--gap-threshold`: suited to measured (noisy) labels.
pub const DEFAULT_GAP: f64 = episcale::solver::GAP_THRESHOLD_NOISY;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Failure,
    /// Multiple or inconsistent verdict, or a failed check.
    Ambiguous,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Failure => 1,
            Status::Ambiguous => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "episcale", version, about = "Recover epipolar scales from relative rotations and directions")]
pub struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a cycle basis and solve for the scales.
    Solve(SolveArgs),
    /// Report biconnectivity, the counting condition and optionally the rank.
    Check(CheckArgs),
    /// Print a cycle basis as vertex sequences.
    Basis(BasisArgs),
    /// Write a synthetic graph file with hidden ground truth.
    Synth(SynthArgs),
    /// Run the noise or outlier sweep.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct BasisOpts {
    #[arg(long, default_value = "mcb")]
    pub basis: BasisKind,
    /// Null-circuit threshold in degrees (N-MCB only).
    #[arg(long, default_value_t = 2.0)]
    pub epsilon: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    /// JSON result file; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub basis: BasisOpts,
    /// Relative singular-value threshold for the rank verdict.
    #[arg(long, default_value_t = DEFAULT_GAP)]
    pub gap_threshold: f64,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    /// Also write the report as JSON.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Add the numerical-rank certificate.
    #[arg(long)]
    pub rank: bool,
    #[command(flatten)]
    pub basis: BasisOpts,
    #[arg(long, default_value_t = DEFAULT_GAP)]
    pub gap_threshold: f64,
}

#[derive(Debug, Clone, Args)]
pub struct BasisArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub basis: BasisOpts,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// Number of cameras (ignored with --poses).
    #[arg(short, long, default_value_t = 20)]
    pub n: usize,
    /// Fraction of camera pairs without a measurement.
    #[arg(long, default_value_t = 0.5)]
    pub missing: f64,
    /// Noise standard deviation in degrees.
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    /// Fraction of edges replaced by random motions.
    #[arg(long, default_value_t = 0.0)]
    pub outliers: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Ground-truth pose list (`id r00 … r22 cx cy cz` per line) to use
    /// instead of random cameras.
    #[arg(long)]
    pub poses: Option<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// noise | outlier
    #[arg(long, default_value = "noise")]
    pub protocol: Protocol,
    #[arg(short, long)]
    pub n: Option<usize>,
    /// Comma-separated missing-pair fractions.
    #[arg(long, value_delimiter = ',')]
    pub missing: Vec<f64>,
    /// Comma-separated noise levels in degrees.
    #[arg(long, value_delimiter = ',')]
    pub sigma: Vec<f64>,
    /// Comma-separated outlier fractions.
    #[arg(long, value_delimiter = ',')]
    pub outliers: Vec<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub fcb_trees: Option<usize>,
    /// breadth | depth | uniform
    #[arg(long, value_parser = parse_tree_search)]
    pub tree_search: Option<TreeSearch>,
    /// Comma-separated methods (fcb, mcb, nmcb).
    #[arg(long, value_delimiter = ',')]
    pub basis: Vec<BasisKind>,
    /// Null-circuit threshold in degrees; the protocol default when omitted.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for trials.csv, summary.json and plot.json.
    #[arg(short, long)]
    pub output: PathBuf,
}

fn parse_tree_search(s: &str) -> Result<TreeSearch, String> {
    match s {
        "breadth" | "bfs" => Ok(TreeSearch::Breadth),
        "depth" | "dfs" => Ok(TreeSearch::Depth),
        "uniform" => Ok(TreeSearch::Uniform),
        other => Err(format!("unknown tree search {other:?} (breadth, depth, uniform)")),
    }
}

/// Dispatches a parsed command line, printing human-readable output to
/// `out`.
pub fn run(cli: &Cli, out: &mut dyn std::io::Write) -> CliResult<Status> {
    match &cli.command {
        Command::Solve(a) => commands::solve(a, out),
        Command::Check(a) => commands::check(a, out),
        Command::Basis(a) => commands::basis(a, out),
        Command::Synth(a) => commands::synth(a, out),
        Command::Bench(a) => commands::bench(a, out),
    }
}
