use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "moelab",
    version,
    about = "Random Stinespring channels, minimum output entropy and Monte Carlo bound checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate S_min of one channel
    Minent(MinentArgs),
    /// Run a verification suite
    Verify(VerifyArgs),
    /// Per-unitary additivity pipeline at toy scale
    Pipeline(PipelineArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitaryChoice {
    Haar,
    Identity,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// 64-bit master seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (0 = all cores); never changes the numbers
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MinentArgs {
    #[arg(long)]
    pub dim_a: usize,
    #[arg(long)]
    pub dim_b: usize,
    /// Random starts for the optimizer
    #[arg(long, default_value_t = 16)]
    pub starts: usize,
    #[arg(long, value_enum, default_value_t = UnitaryChoice::Haar)]
    pub unitary: UnitaryChoice,
    /// Cross-check against the brute-force oracle (|A| ≤ 4)
    #[arg(long)]
    pub oracle: bool,
    /// Grid size for the oracle
    #[arg(long, default_value_t = 2000)]
    pub grid: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Geometric,
    Median,
    Prop5,
    Hhl,
    Levy,
    Fg,
    Independence,
    Hayden,
    Bounds,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// |A| (the state dimension for levy); suite default when absent
    #[arg(long)]
    pub dim_a: Option<usize>,
    /// |B| (the matrix dimension D for bounds)
    #[arg(long)]
    pub dim_b: Option<usize>,
    #[arg(long)]
    pub trials: Option<u64>,
    /// Unitaries for hayden, states per dimension for bounds
    #[arg(long)]
    pub samples: Option<u64>,
    /// Per-trial CSV log (fg)
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// a in Y_{|B|,a}
    #[arg(long)]
    pub a_param: Option<f64>,
    /// N in TUBE(σ, N) for the fg thresholds (default |A|)
    #[arg(long)]
    pub tube_n: Option<usize>,
    /// c in X_{D,N,c} and the δS event
    #[arg(long)]
    pub c: Option<f64>,
    /// ε for prop5 and hhl
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// α for levy
    #[arg(long)]
    pub alpha: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PipelineArgs {
    #[arg(long, default_value_t = 4)]
    pub dim_a: usize,
    #[arg(long, default_value_t = 2)]
    pub dim_b: usize,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 3.0)]
    pub a_param: f64,
    /// Unitaries to sample
    #[arg(long, default_value_t = 10)]
    pub samples: u64,
    /// Random starts per single-channel optimization
    #[arg(long, default_value_t = 8)]
    pub starts: usize,
    /// Haar inputs per unitary for the X/Y frequencies
    #[arg(long, default_value_t = 50)]
    pub inputs: u64,
    #[arg(long)]
    pub tube_n: Option<usize>,
    #[arg(long, value_enum, default_value_t = UnitaryChoice::Haar)]
    pub unitary: UnitaryChoice,
    /// Per-unitary CSV; defaults to the --out path with a .csv extension
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}
