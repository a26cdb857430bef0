//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "spider",
    version,
    about = "Occupation laws of Brownian spiders: sampling, densities, figures and checks"
)]
pub struct Cli {
    /// Master seed; falls back to SPIDER_SEED, then to the pre-registered seed.
    #[arg(long, global = true, env = "SPIDER_SEED")]
    pub seed: Option<u64>,
    /// Worker threads (outputs do not depend on this).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Omit timestamps so reruns are byte-identical.
    #[arg(long, global = true)]
    pub deterministic: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a batch from one law and write CSV plus a JSON sidecar.
    Sample(SampleArgs),
    /// Run lattice spider walks under a stopping rule.
    Simulate(SimulateArgs),
    /// Tabulate the density and distribution function of one law.
    Density(DensityArgs),
    /// Density of the stable ratio A for several mu, with an SVG overlay.
    Figure1(Figure1Args),
    /// Density of one spider occupation fraction for several n, with an SVG overlay.
    Figure2(Figure2Args),
    /// Run a verification suite and write one JSON report per line.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LawName {
    ArcSine,
    StableRatioA,
    StableRatioPower,
    SpiderOccupation,
    PositiveStable,
    StableHalf,
    CMu,
    CauchyMarginal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Route {
    NormalRatio,
    CosSquared,
    StableRatio,
    Cauchy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RuleName {
    FixedTime,
    InverseOccupation,
    InverseLocalTime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Transforms,
    Densities,
    Theorem1,
    Corollary,
    All,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub law: LawName,
    /// Stable index in (0, 1).
    #[arg(long)]
    pub mu: Option<f64>,
    /// Number of rays.
    #[arg(long)]
    pub n: Option<u32>,
    /// Construction used for arc-sine draws.
    #[arg(long, default_value = "normal-ratio")]
    pub route: Route,
    /// Number of draws.
    #[arg(long)]
    pub count: usize,
    /// Random streams the batch is split over.
    #[arg(long, default_value_t = 8)]
    pub streams: u64,
    /// CSV path; the sidecar and manifest go next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Number of rays (at least 2).
    #[arg(long)]
    pub n: u32,
    /// Lattice steps per unit of continuum time.
    #[arg(long, default_value_t = 20_000)]
    pub steps: u64,
    #[arg(long, default_value_t = 1000)]
    pub paths: usize,
    #[arg(long, default_value = "fixed-time")]
    pub rule: RuleName,
    /// Rule level: time t, occupation s or local time l. Defaults to 1, 1/n and sqrt(2/pi).
    #[arg(long)]
    pub level: Option<f64>,
    /// Ray watched by the inverse-occupation rule (1-based).
    #[arg(long, default_value_t = 2)]
    pub ray: u32,
    /// Step cap as a multiple of the rule's horizon.
    #[arg(long)]
    pub cap_factor: Option<f64>,
    /// Per-path CSV; the manifest goes next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    /// One of arc-sine, stable-ratio-a, stable-ratio-power, spider-occupation.
    #[arg(long)]
    pub law: LawName,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub n: Option<u32>,
    /// Interior grid points.
    #[arg(long, default_value_t = 999)]
    pub grid: usize,
    /// CSV path; the sidecar and manifest go next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct Figure1Args {
    /// Comma-separated stable indices, one curve each.
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.25, 0.5, 0.75, 0.9])]
    pub mu: Vec<f64>,
    #[arg(long, default_value_t = 999)]
    pub grid: usize,
    /// Output prefix: PREFIX_mu<mu>.csv per curve and PREFIX.svg.
    #[arg(long, default_value = "figure1")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct Figure2Args {
    /// Comma-separated ray counts, one curve each.
    #[arg(long, value_delimiter = ',', default_values_t = [2, 3, 4, 5, 8])]
    pub n: Vec<u32>,
    #[arg(long, default_value_t = 999)]
    pub grid: usize,
    /// Output prefix: PREFIX_n<n>.csv per curve and PREFIX.svg.
    #[arg(long, default_value = "figure2")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all")]
    pub suite: Suite,
    /// JSON-lines report path; without it only the summary table is printed.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Monte-Carlo draws per transform check.
    #[arg(long)]
    pub count: Option<usize>,
    /// Log-grid points for the scaling-limit distances.
    #[arg(long)]
    pub grid: Option<usize>,
}
