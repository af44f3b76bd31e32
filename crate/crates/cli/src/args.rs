use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kneadlab_core::diagnostics::ExponentSign;

#[derive(Debug, Parser)]
#[command(
    name = "kneadlab",
    version,
    about = "Kneading maps, closest precritical points and their diagnostics"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// fibonacci | feigenbaum | constant<q> | fibonacci-like<n>
    #[arg(long, global = true, conflicts_with = "map")]
    pub rule: Option<String>,
    /// Kneading map as inline JSON or a path to a JSON file.
    #[arg(long, global = true)]
    pub map: Option<String>,
    /// Even critical order.
    #[arg(long, global = true, default_value_t = 2)]
    pub ell: u32,
    /// Depth K (defaults per command).
    #[arg(short = 'K', long = "depth", global = true)]
    pub depth: Option<usize>,
    /// Working precision in bits.
    #[arg(long, global = true, default_value_t = 256)]
    pub bits: u32,
    /// Parameter bracket width goal, as 2^-target.
    #[arg(long, global = true, default_value_t = 48)]
    pub target: u32,
    /// Precision cap for adaptive refinement.
    #[arg(long, global = true, default_value_t = 4096)]
    pub max_bits: u32,
    /// Longest critical orbit a single itinerary comparison may iterate.
    #[arg(long, global = true, default_value_t = 1 << 27)]
    pub max_orbit_len: u64,
    /// Use this parameter instead of solving for one.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub c: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cutting times S_0..S_K.
    CuttingTimes,
    /// Classification and admissibility of the kneading map.
    Check(CheckArgs),
    /// Bracket the parameter realizing the kneading map.
    Solve,
    /// Closest precritical points ζ_0..ζ_K.
    Precrit,
    /// Ratios |f^{S_{k+1}}(0)| / |f^{S_k}(0)| and their tail mean λ̂.
    Scaling,
    /// |Df^{S_k}| at the closest precritical points.
    Band(BandArgs),
    /// Partial sums of the long-branched series (or the divergence criterion).
    Sums(SumsArgs),
    /// Almost saddle-node cascade.
    Cascade(CascadeArgs),
    /// Truncated Poincaré series of z^ℓ + c.
    Poincare(PoincareArgs),
    /// Green function of the filled Julia set.
    Green(GreenArgs),
    /// Closest-return law, containment, monotone neighbourhoods, sectors.
    VerifyLemmas(VerifyArgs),
    /// Solve, build the ladder and run every diagnostic.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub admissible: bool,
    #[arg(long)]
    pub strict_hofbauer: bool,
    #[arg(long)]
    pub fibonacci_like: bool,
    /// Eventually-periodic Feigenbaum combinatorics.
    #[arg(long)]
    pub feigenbaum: bool,
    #[arg(long)]
    pub renormalizable: bool,
    /// Lookahead for the admissibility comparison.
    #[arg(long, default_value_t = 64)]
    pub window: usize,
}

#[derive(Debug, Clone, Args)]
pub struct BandArgs {
    /// k range as `lo,hi` (default `K/2,K`).
    #[arg(long, value_parser = parse_pair)]
    pub window: Option<(u64, u64)>,
    #[arg(long, default_value_t = 100.0)]
    pub bound: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SumsArgs {
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    pub sign: ExponentSign,
    /// With --lambda: report the Fibonacci divergence criterion instead.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct CascadeArgs {
    /// Range of N as `lo,hi` (default `2,S_K`).
    #[arg(long, value_parser = parse_pair)]
    pub window: Option<(u64, u64)>,
    /// Critical-orbit length to scan (default `S_{K+4}`).
    #[arg(long)]
    pub orbit_len: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct PoincareArgs {
    /// Base point, `x` or `x+yi`.
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    /// Drop subtrees lighter than this (needs --min-deriv).
    #[arg(long, requires = "min_deriv")]
    pub prune_eps: Option<f64>,
    /// Caller-supplied lower bound on |Df| along the tree.
    #[arg(long)]
    pub min_deriv: Option<f64>,
    /// Emit the leaves of the deepest level instead of the level sums.
    #[arg(long)]
    pub leaves: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GreenArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Levels for the monotone-neighbourhood check.
    #[arg(long, value_delimiter = ',', default_values_t = vec![6usize, 8, 10])]
    pub neighbourhood: Vec<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    pub sign: ExponentSign,
    #[arg(long, default_value_t = 100.0)]
    pub band_bound: f64,
}

fn parse_pair(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `lo,hi`, got {s:?}"))?;
    let a: u64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: u64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    if a > b {
        return Err(format!("empty range {a},{b}"));
    }
    Ok((a, b))
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CuttingTimes => "cutting-times",
            Command::Check(_) => "check",
            Command::Solve => "solve",
            Command::Precrit => "precrit",
            Command::Scaling => "scaling",
            Command::Band(_) => "band",
            Command::Sums(_) => "sums",
            Command::Cascade(_) => "cascade",
            Command::Poincare(_) => "poincare",
            Command::Green(_) => "green",
            Command::VerifyLemmas(_) => "verify-lemmas",
            Command::Report(_) => "report",
        }
    }

    pub fn default_depth(&self) -> usize {
        match self {
            Command::CuttingTimes => 10,
            Command::Check(_) => 40,
            Command::Solve | Command::Precrit | Command::VerifyLemmas(_) => 12,
            Command::Scaling | Command::Band(_) => 18,
            Command::Sums(_) | Command::Report(_) => 14,
            Command::Cascade(_) => 8,
            Command::Poincare(_) => 8,
            Command::Green(_) => 0,
        }
    }

    /// JSON unless the output is naturally a table.
    pub fn default_format(&self) -> Format {
        match self {
            Command::Solve | Command::Report(_) | Command::Green(_) => Format::Json,
            _ => Format::Csv,
        }
    }
}
