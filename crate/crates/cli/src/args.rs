use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fedpnn_core::dataset::ShardingMode;

#[derive(Debug, Parser)]
#[command(name = "fedpnn", version, about = "One-shot federated PNN simulations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one federation round and write the report.
    Run(RunArgs),
    /// Repeat the round over a grid of one parameter and write a CSV.
    Sweep(SweepArgs),
    /// Score a synthetic table against the real one.
    EvalSynth(EvalSynthArgs),
    /// Split a dataset into the server reserve and client shards.
    Partition(PartitionArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sharding {
    SimpleRandom,
    Stratified,
}

impl From<Sharding> for ShardingMode {
    fn from(s: Sharding) -> Self {
        match s {
            Sharding::SimpleRandom => ShardingMode::SimpleRandom,
            Sharding::Stratified => ShardingMode::Stratified,
        }
    }
}

/// Flags shared by `run` and `sweep`; each one overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct ExperimentArgs {
    /// TOML experiment file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Input CSV (required unless the config names one).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Label column: `last`, a zero-based index or a header name.
    #[arg(long)]
    pub label_col: Option<String>,
    /// Number of clients K.
    #[arg(long)]
    pub clients: Option<usize>,
    /// Server reserve in percent of all rows.
    #[arg(long)]
    pub server_frac: Option<f64>,
    #[arg(long)]
    pub client_dthr: Option<f64>,
    #[arg(long)]
    pub server_dthr: Option<f64>,
    /// Gaussian kernel width.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub sharding: Option<Sharding>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// Report file; the table is printed either way.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    ClientDthr,
    ServerDthr,
    Sigma,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    #[arg(long, value_enum)]
    pub sweep_axis: Axis,
    #[arg(long)]
    pub sweep_start: f64,
    #[arg(long)]
    pub sweep_stop: f64,
    #[arg(long)]
    pub sweep_step: f64,
    /// CSV destination.
    #[arg(long)]
    pub out: PathBuf,
    /// Directory for `auc.svg` and `centers.svg`.
    #[arg(long)]
    pub plot_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalSynthArgs {
    #[arg(long)]
    pub real: PathBuf,
    #[arg(long)]
    pub synth: PathBuf,
    #[arg(long, default_value = "last")]
    pub label_col: String,
    /// Report file; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "last")]
    pub label_col: String,
    #[arg(long, default_value_t = 2)]
    pub clients: usize,
    /// Server reserve in percent of all rows.
    #[arg(long, default_value_t = 10.0)]
    pub server_frac: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "simple-random")]
    pub sharding: Sharding,
    /// Output directory for the manifest and shard CSVs.
    #[arg(long)]
    pub out: PathBuf,
}
