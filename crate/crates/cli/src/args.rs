use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

use svol_core::estimators::AggregationMode;
use svol_core::io::{DatasetKind, ReportFormat};

pub const DEFAULT_SEED: u64 = 2019;

#[derive(Parser, Debug)]
#[command(name = "svol", version, about = "Stochastic-volatility analytics: Heston moments, densities, simulation and estimators")]
pub struct Cli {
    /// Seed for every random stream of the run
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,

    /// Report format (csv | json)
    #[arg(long, global = true, default_value = "csv")]
    pub format: ReportFormat,

    /// TOML file supplying flags that are not given on the command line
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Closed-form moments and the EIV/VIV/EMIV decomposition
    #[command(allow_negative_numbers = true)]
    Moments(MomentsArgs),
    /// Fourier-inversion densities for several correlations on one grid
    #[command(allow_negative_numbers = true)]
    DensityCompare(DensityCompareArgs),
    /// Monte Carlo paths of a registered variance model
    #[command(allow_negative_numbers = true)]
    Simulate(SimulateArgs),
    /// Marginal-variance dynamics and RIV of return series
    Interaction(InteractionArgs),
    /// EIV/RIV and quantile shape measures per series
    SizeReport(SizeReportArgs),
    /// Square-root-of-time rule against simulated conditional variance
    #[command(allow_negative_numbers = true)]
    Srtr(SrtrArgs),
    /// Maximum-likelihood generalized hyperbolic fit
    FitGh(FitGhArgs),
    /// Kolmogorov-Smirnov test against a fitted GH law
    KsTest(KsTestArgs),
    /// Regenerate every artifact of a named figure or table
    Reproduce(ReproduceArgs),
}

/// Heston coefficients other than the correlation.
#[derive(Args, Debug, Clone)]
pub struct CoeffArgs {
    #[arg(long, default_value_t = 0.0)]
    pub r: f64,
    #[arg(long)]
    pub kappa: f64,
    #[arg(long)]
    pub theta: f64,
    #[arg(long)]
    pub sigma: f64,
    /// Accept parameters with 2 kappa theta <= sigma^2
    #[arg(long)]
    pub allow_feller_violation: bool,
}

#[derive(Args, Debug)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub coeff: CoeffArgs,
    #[arg(long)]
    pub rho: f64,
    /// Horizons in years
    #[arg(long, value_delimiter = ',', conflicts_with = "days")]
    pub t: Vec<f64>,
    /// Horizons in trading days [default: 1,5,25,125,252]
    #[arg(long, value_delimiter = ',')]
    pub days: Vec<f64>,
}

#[derive(Args, Debug)]
pub struct DensityCompareArgs {
    #[command(flatten)]
    pub coeff: CoeffArgs,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, -1.0])]
    pub rho_list: Vec<f64>,
    /// Horizon in years
    #[arg(long, conflicts_with = "days")]
    pub t: Option<f64>,
    /// Horizon in trading days [default: 5]
    #[arg(long)]
    pub days: Option<f64>,
    /// Number of grid points
    #[arg(long, default_value_t = 801)]
    pub grid: usize,
    /// Grid half-width in unconditional standard deviations
    #[arg(long, default_value_t = 10.0)]
    pub width_sd: f64,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Registered variance model
    #[arg(long, default_value = "cir")]
    pub model: String,
    /// Model parameters as key=value pairs
    #[arg(long, value_delimiter = ',')]
    pub param: Vec<String>,
    /// Correlation of the log return with the variance driver; taken from the
    /// model parameters when they contain `rho`
    #[arg(long)]
    pub rho: Option<f64>,
    /// Drift of the log return; taken from the model parameters when they contain `r`
    #[arg(long)]
    pub r: Option<f64>,
    /// Simulate the variance only
    #[arg(long, conflicts_with = "rho")]
    pub variance_only: bool,
    /// Fixed initial variance; stationary draw when absent
    #[arg(long)]
    pub v0: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub paths: usize,
    /// Horizon in years
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, default_value_t = svol_core::sim::DEFAULT_STEPS_PER_YEAR)]
    pub steps_per_year: u32,
    /// Also write the raw per-path values as little-endian f64
    #[arg(long)]
    pub raw: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum KindArg {
    #[value(name = "ff_daily_percent")]
    FfDailyPercent,
    #[value(name = "returns_csv")]
    ReturnsCsv,
    #[value(name = "prices_csv")]
    PricesCsv,
}

impl From<KindArg> for DatasetKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::FfDailyPercent => DatasetKind::FfDailyPercent,
            KindArg::ReturnsCsv => DatasetKind::ReturnsCsv,
            KindArg::PricesCsv => DatasetKind::PricesCsv,
        }
    }
}

/// Dataset selection shared by the data-driven commands.
#[derive(Args, Debug, Clone)]
pub struct DataArgs {
    /// Data file; relative paths resolve against $SVOL_DATA_DIR when it is set
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum, default_value = "ff_daily_percent")]
    pub kind: KindArg,
    /// Series to keep (all when absent)
    #[arg(long, value_delimiter = ',')]
    pub columns: Vec<String>,
    /// First date kept (YYYYMMDD or YYYY-MM-DD)
    #[arg(long)]
    pub start: Option<String>,
    /// Last date kept
    #[arg(long)]
    pub end: Option<String>,
    /// Fama-French table to read, matched against its title
    #[arg(long)]
    pub section: Option<String>,
    /// The returns file already holds log returns
    #[arg(long)]
    pub log_returns: bool,
}

#[derive(Args, Debug, Clone)]
pub struct BootstrapArgs {
    #[arg(long, default_value_t = 25)]
    pub block: usize,
    #[arg(long, default_value_t = 1000)]
    pub resamples: usize,
    #[arg(long, default_value_t = 0.95)]
    pub confidence: f64,
}

#[derive(Args, Debug)]
pub struct InteractionArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Horizons in trading days
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 5, 10, 25, 50, 125, 250])]
    pub horizons: Vec<usize>,
    /// Reference horizon s in days
    #[arg(long, default_value_t = 1)]
    pub ref_horizon: usize,
    #[arg(long, default_value = "overlap")]
    pub mode: AggregationMode,
    #[command(flatten)]
    pub bootstrap: BootstrapArgs,
}

#[derive(Args, Debug)]
pub struct SizeReportArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Horizon of the EIV and RIV columns, in days
    #[arg(long, default_value_t = 25)]
    pub horizon_days: usize,
    #[arg(long, default_value_t = 1)]
    pub ref_horizon: usize,
    #[arg(long, default_value = "overlap")]
    pub mode: AggregationMode,
    #[arg(long, default_value_t = svol_core::estimators::HINKLEY_ALPHA)]
    pub hinkley_alpha: f64,
    #[command(flatten)]
    pub bootstrap: BootstrapArgs,
}

#[derive(Args, Debug)]
pub struct SrtrArgs {
    #[command(flatten)]
    pub coeff: CoeffArgs,
    #[arg(long)]
    pub rho: f64,
    /// Horizon in years [default: 2/12]
    #[arg(long, conflicts_with = "days")]
    pub t: Option<f64>,
    /// Horizon in trading days
    #[arg(long)]
    pub days: Option<f64>,
    /// Initial variances; stationary quantiles when absent
    #[arg(long, value_delimiter = ',')]
    pub v0_grid: Vec<f64>,
    /// Number of stationary quantiles in the default grid
    #[arg(long, default_value_t = svol_core::sim::DEFAULT_V0_POINTS)]
    pub points: usize,
    /// Paths per grid point
    #[arg(long, default_value_t = 100_000)]
    pub paths: usize,
    #[arg(long, default_value_t = svol_core::sim::DEFAULT_STEPS_PER_YEAR)]
    pub steps_per_year: u32,
}

#[derive(Args, Debug)]
pub struct FitGhArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Histogram bins of the density figure data
    #[arg(long, default_value_t = 200)]
    pub bins: usize,
}

#[derive(Args, Debug)]
pub struct KsTestArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// GH parameters (a fit-gh JSON report or a bare parameter object); fitted when absent
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Use every `stride`-th observation
    #[arg(long, default_value_t = 21)]
    pub stride: usize,
}

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    /// Recipe name; `--list` shows them
    #[arg(long, required_unless_present = "list")]
    pub recipe: Option<String>,
    #[arg(long)]
    pub list: bool,
    /// Data file overriding the recipe's default location
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    #[arg(long, value_delimiter = ',')]
    pub columns: Vec<String>,
    #[arg(long)]
    pub start: Option<String>,
    #[arg(long)]
    pub end: Option<String>,
}
