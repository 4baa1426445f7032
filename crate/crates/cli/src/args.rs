use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Bin-scheme measurement of relative quantities in positive data.
#[derive(Debug, Parser)]
#[command(name = "binlaw", version, about)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, env = "BINLAW_FORMAT", default_value_t = Format::Table)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Tsv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tally a data file under a bin scheme and compare it with theory.
    Analyze(AnalyzeArgs),
    /// Print a theoretical proportion vector.
    Law(LawArgs),
    /// Show how the finite series approaches the closed-form law.
    Series(SeriesArgs),
    /// Write synthetic data, one value per line.
    Simulate(SimulateArgs),
    /// Rebuild a published table from synthetic data.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct SchemeArgs {
    /// Bins per cycle.
    #[arg(long, short = 'd', default_value_t = 9)]
    pub bins: u32,

    /// Constant inflation factor.
    #[arg(long, short = 'f', default_value_t = 10.0, conflicts_with_all = ["factors", "second_order_base"])]
    pub factor: f64,

    /// Comma-separated per-cycle factors instead of a constant one.
    #[arg(long, value_delimiter = ',', num_args = 1.., conflicts_with = "second_order_base")]
    pub factors: Option<Vec<f64>>,

    /// Use the second-digit scheme of this base (bins = base).
    #[arg(long)]
    pub second_order_base: Option<u32>,

    /// Periods of the second-digit scheme.
    #[arg(long, default_value_t = 12, requires = "second_order_base")]
    pub periods: u32,

    /// Left edge of the first bin.
    #[arg(long, short = 's', default_value_t = 0.0)]
    pub start: f64,

    /// Initial bin width.
    #[arg(long, short = 'w', default_value_t = binlaw::DEFAULT_WIDTH)]
    pub width: f64,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Plain-text (one number per line) or CSV file.
    pub input: PathBuf,

    /// CSV column, by header name or 0-based index. Implies CSV input.
    #[arg(long, short = 'c')]
    pub column: Option<String>,

    #[command(flatten)]
    pub scheme: SchemeArgs,

    /// Skip unparsable lines and count them instead of failing.
    #[arg(long)]
    pub lenient: bool,

    /// Include per-cycle proportions.
    #[arg(long)]
    pub per_cycle: bool,

    /// Smallest cycle count shown in the per-cycle table.
    #[arg(long, default_value_t = binlaw::DEFAULT_MIN_CYCLE_COUNT)]
    pub min_count: u64,

    /// MAD threshold for the conformance verdict.
    #[arg(long, default_value_t = binlaw::DEFAULT_MAD_THRESHOLD)]
    pub threshold: f64,

    /// Metadata sidecar written by `simulate`; its seed and generator are
    /// copied into the report.
    #[arg(long)]
    pub meta: Option<PathBuf>,

    /// Write the report here instead of stdout.
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("law").required(true).args(["bins", "base", "flat"])))]
pub struct LawArgs {
    /// Bins per cycle of a constant-factor scheme.
    #[arg(long, requires = "factor")]
    pub bins: Option<u32>,

    #[arg(long)]
    pub factor: Option<f64>,

    /// Benford distribution of this base.
    #[arg(long)]
    pub base: Option<u32>,

    /// Digit order for --base (1 or 2).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub order: u8,

    /// Flat-scheme limit with this many bins.
    #[arg(long)]
    pub flat: Option<u32>,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    #[arg(long, short = 'd')]
    pub bins: u32,

    #[arg(long, short = 'f')]
    pub factor: f64,

    /// Largest cycle count shown (at most 10000).
    #[arg(long, default_value_t = 200)]
    pub n_max: u64,

    /// Gap that counts as converged.
    #[arg(long, default_value_t = 1e-3)]
    pub tolerance: f64,

    /// Print every k-th row (the last row is always printed).
    #[arg(long, default_value_t = 1)]
    pub step: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Kx,
    Lognormal,
    ExpGrowth,
    LogTriangular,
    ChainUniform,
    Uniform,
    NormalPositive,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub family: FamilyName,

    /// kx: lower decimal exponent. uniform: lower bound.
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,

    /// kx: upper decimal exponent. uniform: upper bound.
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,

    /// lognormal: mean of ln x.
    #[arg(long, allow_negative_numbers = true)]
    pub location: Option<f64>,

    /// lognormal: standard deviation of ln x.
    #[arg(long)]
    pub shape: Option<f64>,

    /// exp-growth: first element.
    #[arg(long)]
    pub base: Option<f64>,

    /// exp-growth: growth factor per element.
    #[arg(long)]
    pub rate: Option<f64>,

    /// log-triangular: lower log10 vertex.
    #[arg(long, allow_negative_numbers = true)]
    pub lo: Option<f64>,

    /// log-triangular: peak log10 vertex.
    #[arg(long, allow_negative_numbers = true)]
    pub mode: Option<f64>,

    /// log-triangular: upper log10 vertex.
    #[arg(long, allow_negative_numbers = true)]
    pub hi: Option<f64>,

    /// chain-uniform: number of nested uniforms.
    #[arg(long)]
    pub depth: Option<u32>,

    /// chain-uniform: outer upper bound.
    #[arg(long)]
    pub top: Option<f64>,

    /// normal-positive: mean.
    #[arg(long, allow_negative_numbers = true)]
    pub mean: Option<f64>,

    /// normal-positive: standard deviation.
    #[arg(long)]
    pub sd: Option<f64>,

    /// Number of values.
    #[arg(long, short = 'n', default_value_t = 100_000)]
    pub n: u64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output file; stdout when omitted.
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,

    /// Write the metadata JSON here instead of stderr.
    #[arg(long)]
    pub meta: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// fig1..fig7, schemeA, schemeB or second_order.
    pub figure: String,

    #[arg(long, default_value_t = 2013)]
    pub seed: u64,

    /// Sample size per generator row.
    #[arg(long, short = 'n', default_value_t = 100_000)]
    pub n: u64,
}
