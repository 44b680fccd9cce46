use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spectral_search_core::classify::GammaRule;
use spectral_search_core::graphs::{Convention, DEFAULT_SIZE_CAP};
use spectral_search_core::spectra::DEFAULT_CLUSTER_TOLERANCE;
use spectral_search_core::walk::DEFAULT_HORIZON_MULTIPLE;

/// Longest fidelity grid accepted by `simulate`.
pub const MAX_GRID_POINTS: usize = 1_000_000;

#[derive(Debug, Parser)]
#[command(
    name = "spectral-search-lab",
    version,
    about = "Spatial search by rank-one perturbed quantum walks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full pipeline and audits on one instance.
    Analyze {
        /// Family spec, e.g. `hamming:n=6,q=2`.
        spec: String,
        /// Target vertex index.
        #[arg(long, default_value_t = 0)]
        vertex: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Fidelity curve f(t) from both evaluation methods.
    Simulate {
        spec: String,
        /// Horizon as a multiple of the critical time.
        #[arg(long, default_value_t = DEFAULT_HORIZON_MULTIPLE)]
        until_multiple: f64,
        /// Number of grid points, including t = 0.
        #[arg(long, default_value_t = 1000)]
        points: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Scaling fits and verdict over a list of sizes.
    Sweep {
        /// Family name, optionally with fixed parameters (`johnson:k=3`).
        spec: String,
        /// Values of the growing parameter (n, or p for prime families).
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Runs the default suite and prints the families table as CSV.
    Families {
        /// Restrict to one family name.
        spec: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Unit,
    Symmetric,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Unit => Convention::UnitInterval,
            ConventionArg::Symmetric => Convention::SymmetricInterval,
        }
    }
}

/// `auto` (γ = S₁), `grover`, or a positive real.
pub fn parse_gamma(text: &str) -> Result<GammaRule, String> {
    match text {
        "auto" | "s1" => Ok(GammaRule::S1),
        "grover" => Ok(GammaRule::Grover),
        other => match other.parse::<f64>() {
            Ok(g) if g > 0.0 && g.is_finite() => Ok(GammaRule::Fixed(g)),
            _ => Err(format!("expected auto, grover or a positive number, got '{other}'")),
        },
    }
}

fn parse_tolerance(text: &str) -> Result<f64, String> {
    match text.parse::<f64>() {
        Ok(t) if t > 0.0 && t < 1.0 => Ok(t),
        _ => Err(format!("tolerance must lie in (0, 1), got '{text}'")),
    }
}

#[derive(Clone, Debug, Args)]
pub struct CommonArgs {
    #[arg(long, value_enum, default_value_t = ConventionArg::Unit)]
    pub convention: ConventionArg,
    #[arg(long, value_parser = parse_gamma, default_value = "auto")]
    pub gamma: GammaRule,
    /// Eigenvalue clustering tolerance.
    #[arg(long, value_parser = parse_tolerance, default_value_t = DEFAULT_CLUSTER_TOLERANCE)]
    pub tolerance: f64,
    /// Recorded in the report; every pipeline is deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Parameter k for Johnson and Grassmann families.
    #[arg(long)]
    pub k: Option<usize>,
    /// Parameter q for Hamming and Grassmann families.
    #[arg(long)]
    pub q: Option<usize>,
    /// Largest vertex count built densely.
    #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
    pub size_cap: usize,
    /// Write the primary artifact here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write the CSV table (curve, sweep rows, families) to this path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}
