use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "loynes",
    version,
    about = "Simulate Lindley queues and estimate Loynes' exponent"
)]
pub struct Cli {
    /// JSON file supplying flag values (a flat object, or a run manifest);
    /// flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Sample an increment (or waiting-time) trace.
    Simulate(SimulateArgs),
    /// Estimate the exponent from a trace file.
    Estimate(EstimateArgs),
    /// Closed-form / numerically exact exponents.
    Analytic(AnalyticArgs),
    /// Rate-function curves.
    RateCurve(RateCurveArgs),
    /// Monte Carlo experiments.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(untagged)]
pub enum ExperimentCommand {
    /// Estimates along one growing realisation.
    Convergence(ConvergenceArgs),
    /// Exceedance rates over independent replicas.
    McLdp(McLdpArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProcessName {
    TwoState,
    FiniteMarkov,
    Dm1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorName {
    Block,
    Markov,
    Extremal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScgfName {
    Block,
    Markov,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnalyticName {
    TwoState,
    Dm1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveName {
    TwoState,
    Legendre,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputKind {
    Increments,
    Waits,
}

#[derive(Debug, Args, Serialize)]
pub struct ProcessArgs {
    #[arg(long, value_enum)]
    pub process: ProcessName,
    /// two-state: P(-1 -> +1); dm1: service rate.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// two-state: P(+1 -> -1); dm1: arrival rate.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// finite-markov transition matrix, rows split by `;`, entries by `,`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<String>,
    /// finite-markov state values, comma separated.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
    /// finite-markov initial state; stationary draw when omitted.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init: Option<usize>,
    /// Steps discarded before the first recorded value.
    #[arg(long, default_value_t = 0)]
    pub warmup: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct OutputArgs {
    /// CSV destination; stdout when omitted.
    #[arg(long, short)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    /// Manifest destination; defaults to `<output>.manifest.json`, or stderr.
    #[arg(long)]
    #[serde(skip)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub process: ProcessArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    /// Emit Lindley waiting times instead of increments.
    #[arg(long)]
    pub waits: bool,
    /// Initial wait for `--waits`.
    #[arg(long, default_value_t = 0.0)]
    pub w0: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct RootArgs {
    /// Residual tolerance of the exponent root.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Largest theta probed before reporting an infinite exponent.
    #[arg(long, default_value_t = 1e6)]
    pub theta_cap: f64,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct EstimateArgs {
    #[arg(value_enum)]
    #[serde(skip)]
    pub estimator: EstimatorName,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "increments")]
    pub input_kind: InputKind,
    /// Block size.
    #[arg(long = "B", default_value_t = 1)]
    #[serde(rename = "B")]
    pub block_size: usize,
    /// Markov state values; defaults to the distinct trace values, ascending.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub states: Vec<f64>,
    /// Initial wait used when the extremal estimator is given increments.
    #[arg(long, default_value_t = 0.0)]
    pub w0: f64,
    /// `start,stop,points` grid for an sCGF curve export.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',', num_args = 1)]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub scgf_grid: Vec<f64>,
    /// Destination of the sCGF curve.
    #[arg(long)]
    #[serde(skip)]
    pub scgf_output: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub root: RootArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct AnalyticArgs {
    #[arg(value_enum)]
    #[serde(skip)]
    pub which: AnalyticName,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub beta: f64,
    /// Decimals printed.
    #[arg(long, default_value_t = 6)]
    pub digits: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct GridArgs {
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.01)]
    pub x_min: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.5)]
    pub x_max: f64,
    #[arg(long, default_value_t = 150)]
    pub points: usize,
    /// Explicit grid, overrides the range.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub x_list: Vec<f64>,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct RateCurveArgs {
    #[arg(value_enum)]
    #[serde(skip)]
    pub kind: CurveName,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Trace for the Legendre curve.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "block")]
    pub estimator: ScgfName,
    #[arg(long = "B", default_value_t = 1)]
    #[serde(rename = "B")]
    pub block_size: usize,
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub states: Vec<f64>,
    /// Half-width of the theta search range of the Legendre transform.
    #[arg(long, default_value_t = 1e3)]
    pub sup_cap: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub process: ProcessArgs,
    #[arg(long, value_enum)]
    pub estimator: EstimatorName,
    #[arg(long = "B", default_value_t = 1)]
    #[serde(rename = "B")]
    pub block_size: usize,
    #[arg(long)]
    pub n_max: usize,
    /// Explicit checkpoints; defaults to every `n_max / 100`.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checkpoints: Vec<usize>,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub root: RootArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct McLdpArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub process: ProcessArgs,
    #[arg(long, value_enum)]
    pub estimator: EstimatorName,
    #[arg(long = "B", default_value_t = 1)]
    #[serde(rename = "B")]
    pub block_size: usize,
    #[arg(long, default_value_t = 10_000)]
    pub replicas: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_list: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub x_list: Vec<f64>,
    #[arg(long)]
    pub base_seed: u64,
    /// Reference exponent; required for finite-markov.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_star_ref: Option<f64>,
    /// Worker threads. Results do not depend on it.
    #[arg(long)]
    #[serde(skip)]
    pub workers: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub root: RootArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}
