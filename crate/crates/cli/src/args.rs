use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Multifractal detrended fluctuation analysis of daily return series.
///
/// Exit codes: 0 success, 1 input or validation error, 2 numerical failure.
#[derive(Debug, Parser)]
#[command(name = "mfdfa", version)]
pub struct Cli {
    /// JSON file with `mfdfa`, `window` and `format` sections; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Directory that receives all outputs and the run manifest.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,

    /// Price CSV preset: `iso` (Date,Close, YYYY-MM-DD) or `investing`
    /// (Date,Price, MM/DD/YYYY, comma thousands separators).
    #[arg(long, global = true)]
    pub format: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a daily price CSV into a `date,value` return series.
    Returns(ReturnsArgs),
    /// Estimate h(q), the singularity spectrum and Δh(q) of a return series.
    Mfdfa(MfdfaArgs),
    /// Rolling-window h(2) and Δh(5) with event annotations.
    Roll(RollArgs),
    /// Write a synthetic return series.
    Generate(GenerateArgs),
    /// Re-run the job recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Log,
    Abs,
}

#[derive(Debug, Args)]
pub struct ReturnsArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = KindArg::Log)]
    pub kind: KindArg,
    /// Asset identifier; defaults to the input file stem.
    #[arg(long)]
    pub asset: Option<String>,
    #[arg(long)]
    pub date_column: Option<String>,
    #[arg(long)]
    pub price_column: Option<String>,
    /// chrono pattern, e.g. `%Y-%m-%d` or `%m/%d/%Y`.
    #[arg(long)]
    pub date_pattern: Option<String>,
    #[arg(long)]
    pub thousands_separator: Option<char>,
    #[arg(long, conflicts_with = "thousands_separator")]
    pub no_thousands_separator: bool,
    #[arg(long)]
    pub decimal_separator: Option<char>,
    /// Drop unparseable rows instead of failing.
    #[arg(long)]
    pub skip_bad_rows: bool,
}

#[derive(Debug, Args, Default)]
pub struct EstimatorArgs {
    /// Detrending polynomial order (default 3).
    #[arg(long)]
    pub poly_order: Option<usize>,
    /// Largest |q| of the symmetric moment grid (default 5).
    #[arg(long)]
    pub q_max: Option<f64>,
    /// Moment grid spacing (default 0.25).
    #[arg(long)]
    pub q_step: Option<f64>,
    /// Explicit comma-separated scales; replaces the default log-spaced grid.
    #[arg(long, value_delimiter = ',')]
    pub scales: Option<Vec<usize>>,
    /// Smallest scale entering the log-log fit.
    #[arg(long)]
    pub fit_min: Option<usize>,
    /// Largest scale entering the log-log fit.
    #[arg(long)]
    pub fit_max: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MfdfaArgs {
    /// Return series CSV with `date,value` columns.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub asset: Option<String>,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
}

#[derive(Debug, Args)]
pub struct RollArgs {
    /// Return series CSV with `date,value` columns.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub asset: Option<String>,
    /// Series kind recorded in the trace.
    #[arg(long, value_enum, default_value_t = KindArg::Log)]
    pub kind: KindArg,
    /// Observations per window: 750 for exchange-traded assets (three years
    /// of 250 trading days), 1095 for continuously traded ones such as
    /// BTC/USD (three years of 365 days).
    #[arg(long)]
    pub window: Option<usize>,
    /// Observations advanced per step (default 1).
    #[arg(long)]
    pub step: Option<usize>,
    /// Extra event marker, `YYYY-MM-DD=label`; repeatable.
    #[arg(long = "event", value_name = "DATE=LABEL")]
    pub events: Vec<String>,
    /// Leave out the built-in event dates.
    #[arg(long)]
    pub no_default_events: bool,
    /// Entries on each side of an event used for before/after means.
    #[arg(long, default_value_t = mfdfa::rolling::DEFAULT_EVENT_HORIZON)]
    pub horizon: usize,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(subcommand)]
    pub kind: GenerateKind,
}

#[derive(Debug, Subcommand)]
pub enum GenerateKind {
    /// I.i.d. standard Gaussian noise.
    White {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Unit-variance fractional Gaussian noise.
    Fgn {
        #[arg(long)]
        hurst: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Binomial multiplicative cascade of length 2^k (seed 0: deterministic).
    Cascade {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}
