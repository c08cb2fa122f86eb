use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "ldpc-waterfall", version, about = "Finite-length waterfall prediction for LDPC ensembles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Predicted bit error rate over a channel sweep.
    Predict(PredictArgs),
    /// Asymptotic decoding threshold of the ensemble.
    Threshold(ThresholdArgs),
    /// Monte Carlo bit error rate over a channel sweep.
    Simulate(SimulateArgs),
    /// Prediction, threshold baseline and simulation in one CSV.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct EnsembleArgs {
    /// Degree-distribution file with `lambda <deg> <coeff>` and `rho <deg> <coeff>` lines.
    #[arg(long, value_name = "FILE")]
    pub ensemble: Option<PathBuf>,
    /// Regular ensemble given as `dv,dc`.
    #[arg(long, value_name = "DV,DC")]
    pub regular: Option<String>,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    /// `bec`, `bsc` or `awgn`, optionally with one point: `bec:0.4`,
    /// `awgn:ebn0=1.5`, `awgn:sigma=0.9`.
    #[arg(long, value_name = "CHANNEL")]
    pub channel: String,
    /// Sweep of ε (BEC/BSC) or σ (AWGN) as `start:stop:step`.
    #[arg(long, value_name = "START:STOP:STEP", conflicts_with = "range_ebn0")]
    pub range: Option<String>,
    /// AWGN sweep in Eb/N0 dB as `start:stop:step`.
    #[arg(long, value_name = "START:STOP:STEP")]
    pub range_ebn0: Option<String>,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Iteration limit for density evolution and the decoders.
    #[arg(long, value_name = "L")]
    pub lmax: Option<usize>,
    /// Worker threads; 0 uses every core. Results do not depend on it.
    #[arg(long, default_value_t = 0, value_name = "W")]
    pub workers: usize,
    /// Output CSV path; the manifest goes to `<out>.manifest.txt`.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Model the BEC/BSC realizations as Gaussian instead of binomial.
    #[arg(long)]
    pub gaussian: bool,
    /// Cells on the AWGN realization grid.
    #[arg(long, default_value_t = 512, value_name = "K")]
    pub cells: usize,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    #[arg(long, default_value_t = 1, value_name = "SEED")]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000_000, value_name = "F")]
    pub max_frames: u64,
    /// Stop a point after this many bit errors; 0 runs every frame.
    #[arg(long, default_value_t = 100, value_name = "E")]
    pub min_errors: u64,
    /// Decode every frame on one graph instead of a fresh one per frame.
    #[arg(long)]
    pub fixed_graph: bool,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Block length; repeat for several.
    #[arg(long = "n", value_name = "N", required = true)]
    pub n: Vec<usize>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// `bec`, `bsc` or `awgn`.
    #[arg(long, value_name = "CHANNEL")]
    pub channel: String,
    #[arg(long, value_name = "L")]
    pub lmax: Option<usize>,
    /// Bisection stops when the bracket is narrower than this.
    #[arg(long, default_value_t = 1e-7, value_name = "TOL")]
    pub tol: f64,
    /// Also write the threshold as CSV.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long = "n", value_name = "N", required = true)]
    pub n: Vec<usize>,
    #[command(flatten)]
    pub sim: SimArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    #[value(alias = "proposed")]
    Predict,
    #[value(alias = "threshold-baseline")]
    Baseline,
    #[value(alias = "simulation")]
    Simulate,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long = "n", value_name = "N", required = true)]
    pub n: Vec<usize>,
    /// Methods to include.
    #[arg(long, value_delimiter = ',', default_value = "predict,baseline")]
    pub methods: Vec<MethodArg>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub sim: SimArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}
