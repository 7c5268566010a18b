//! Argument definitions for every subcommand.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "umfi",
    version,
    about = "Feature importance via dependence removal (UMFI) and marginal-contribution baselines",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Master seed for every randomized step.
    #[arg(long, global = true, env = "UMFI_SEED", default_value_t = 42)]
    pub seed: u64,

    /// Worker threads (0 = all cores). Never changes numeric results.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// Print progress notes to standard error.
    #[arg(long, global = true)]
    pub verbose: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ultra-marginal importance: two forest fits per feature.
    Umfi(UmfiArgs),
    /// Marginal-contribution importance by subset enumeration.
    Mci(MciArgs),
    /// Strip one column's influence from all other columns of a matrix.
    RemoveDeps(RemoveDepsArgs),
    /// Audit how well removal works and how much it distorts columns.
    Diagnose(DiagnoseArgs),
    /// Run a replicated simulation study with box-plot summaries.
    Simulate(SimulateArgs),
    /// Time exact MCI against UMFI over feature-subset sizes.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaskArg {
    /// Numeric response, out-of-bag R².
    Reg,
    /// Categorical response, out-of-bag accuracy.
    Cls,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RemovalArg {
    /// Pairwise optimal-transport quantile mapping.
    Ot,
    /// Linear-regression residualization gated by a t-test.
    Lr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MciModeArg {
    /// Enumerate every non-empty subset (2^p − 1 fits, p ≤ 20).
    Exact,
    /// Enumerate subsets of size ≤ 3 only.
    K3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DesignArg {
    /// Correlated features with an interaction term in the response.
    CorrInt,
    /// A near-duplicate of one relevant feature plus pure noise.
    Corr,
    /// Response driven only by the sign product of two features.
    Xor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StudyMethodArg {
    /// Marginal-contribution importance (exact for p ≤ 10, else size-3).
    Mci,
    /// UMFI with the regression-residual backend.
    UmfiLr,
    /// UMFI with the optimal-transport backend.
    UmfiOt,
}

/// Forest hyper-parameters shared by every model-fitting subcommand.
#[derive(Debug, Args, Clone)]
pub struct ForestArgs {
    /// Trees per forest.
    #[arg(long, default_value_t = 100)]
    pub trees: usize,

    /// Features tried per split (default: ceil(sqrt p) for classification,
    /// ceil(p/3) for regression).
    #[arg(long)]
    pub mtry: Option<usize>,

    /// Nodes at or below this size become leaves (default: 5 regression,
    /// 1 classification).
    #[arg(long)]
    pub min_node_size: Option<usize>,
}

/// Dependence-removal knobs shared by commands that build S*.
#[derive(Debug, Args, Clone)]
pub struct RemovalKnobs {
    /// Target rows per quantile bin in the transport backend.
    #[arg(long, default_value_t = 100)]
    pub bin_size: usize,

    /// Two-sided significance level gating residualization.
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct UmfiArgs {
    /// Input CSV with a header row.
    #[arg(long)]
    pub input: PathBuf,

    /// Name of the response column.
    #[arg(long)]
    pub response: String,

    #[arg(long, value_enum, default_value_t = TaskArg::Reg)]
    pub task: TaskArg,

    /// Dependence-removal backend.
    #[arg(long, value_enum, default_value_t = RemovalArg::Ot)]
    pub method: RemovalArg,

    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub json: Option<PathBuf>,

    #[command(flatten)]
    pub forest: ForestArgs,

    #[command(flatten)]
    pub removal: RemovalKnobs,
}

#[derive(Debug, Args)]
pub struct MciArgs {
    /// Input CSV with a header row.
    #[arg(long)]
    pub input: PathBuf,

    /// Name of the response column.
    #[arg(long)]
    pub response: String,

    #[arg(long, value_enum, default_value_t = TaskArg::Reg)]
    pub task: TaskArg,

    /// Subset enumeration mode.
    #[arg(long, value_enum, default_value_t = MciModeArg::Exact)]
    pub mode: MciModeArg,

    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub json: Option<PathBuf>,

    #[command(flatten)]
    pub forest: ForestArgs,
}

#[derive(Debug, Args)]
pub struct RemoveDepsArgs {
    /// Input CSV; every column is treated as a numeric feature.
    #[arg(long)]
    pub input: PathBuf,

    /// Column whose influence is removed from all others.
    #[arg(long)]
    pub protected: String,

    #[arg(long, value_enum, default_value_t = RemovalArg::Ot)]
    pub method: RemovalArg,

    /// Output CSV of transformed columns (protected column dropped).
    #[arg(long)]
    pub output: PathBuf,

    #[command(flatten)]
    pub removal: RemovalKnobs,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    /// Input CSV; every column is treated as a numeric feature.
    #[arg(long)]
    pub input: PathBuf,

    /// Comma-separated protected columns to audit.
    #[arg(long, value_delimiter = ',', required = true)]
    pub features: Vec<String>,

    /// Removal backends to audit.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [RemovalArg::Ot, RemovalArg::Lr])]
    pub methods: Vec<RemovalArg>,

    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub json: Option<PathBuf>,

    #[command(flatten)]
    pub forest: ForestArgs,

    #[command(flatten)]
    pub removal: RemovalKnobs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Which simulation design to run.
    #[arg(long, value_enum)]
    pub design: DesignArg,

    /// Number of independent replications.
    #[arg(long, default_value_t = 100)]
    pub reps: usize,

    /// Rows per replication.
    #[arg(long, default_value_t = 500)]
    pub n: usize,

    /// Importance methods to compare.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [StudyMethodArg::Mci, StudyMethodArg::UmfiLr, StudyMethodArg::UmfiOt])]
    pub methods: Vec<StudyMethodArg>,

    /// Write the JSON summary here instead of standard output.
    #[arg(long)]
    pub json: Option<PathBuf>,

    /// Also write one CSV row per (replication, method, feature, share).
    #[arg(long)]
    pub csv_points: Option<PathBuf>,

    #[command(flatten)]
    pub forest: ForestArgs,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// Dataset to subsample features from; omit to use synthetic data.
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Response column of --input (required with --input).
    #[arg(long)]
    pub response: Option<String>,

    #[arg(long, value_enum, default_value_t = TaskArg::Reg)]
    pub task: TaskArg,

    /// Comma-separated feature-subset sizes to time.
    #[arg(long, value_delimiter = ',', default_values_t = [5usize, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15])]
    pub sizes: Vec<usize>,

    /// Rows of the synthetic fallback dataset.
    #[arg(long, default_value_t = 571)]
    pub synthetic_rows: usize,

    /// Columns of the synthetic fallback dataset (default: max of --sizes).
    #[arg(long)]
    pub synthetic_features: Option<usize>,

    /// Write the JSON results here instead of standard output.
    #[arg(long)]
    pub json: Option<PathBuf>,

    #[command(flatten)]
    pub forest: ForestArgs,
}
