use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fcssc_core::evaluation::{DEFAULT_FOLDS, DEFAULT_KNN_K};
use fcssc_core::{ClusteringMode, LabelColumn};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "fcssc",
    version,
    about = "Fuzzy feature clustering and separability/consistency feature selection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Group redundant features with fuzzy C-means.
    Cluster(RunArgs),
    /// Run the two-stage selector and print its trace.
    Select(RunArgs),
    /// Cross-validate all features and the selected subset with KNN.
    Evaluate(RunArgs),
    /// Friedman test and critical difference over per-method result files.
    Stats(StatsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Clustering {
    Auto,
    On,
    Off,
}

impl From<Clustering> for ClusteringMode {
    fn from(c: Clustering) -> Self {
        match c {
            Clustering::Auto => ClusteringMode::Auto,
            Clustering::On => ClusteringMode::On,
            Clustering::Off => ClusteringMode::Off,
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// CSV file with one sample per row.
    #[arg(long, env = "FCSSC_INPUT")]
    pub input: PathBuf,

    /// Label column, by header name or zero-based index. Defaults to the last column.
    #[arg(long, env = "FCSSC_LABEL_COL")]
    pub label_col: Option<String>,

    /// Treat the first row as data.
    #[arg(long, env = "FCSSC_NO_HEADER")]
    pub no_header: bool,

    /// Weight of global separability against local consistency.
    #[arg(long, default_value_t = 0.5, env = "FCSSC_BETA")]
    pub beta: f64,

    /// Maximum number of selected features. Defaults to M, or 50 when M > 100.
    #[arg(long, env = "FCSSC_DELTA")]
    pub delta: Option<usize>,

    /// Neighbourhood radius divisor for the feature similarity relations.
    #[arg(long, default_value_t = 1.0, env = "FCSSC_PI")]
    pub pi: f64,

    #[arg(long, value_enum, default_value_t = Clustering::Auto, env = "FCSSC_CLUSTERING")]
    pub clustering: Clustering,

    /// Number of feature clusters, overriding ceil(sqrt(M) ln M).
    #[arg(long, env = "FCSSC_K")]
    pub k: Option<usize>,

    /// Neighbours used by the KNN classifier.
    #[arg(long, default_value_t = DEFAULT_KNN_K, env = "FCSSC_KNN_K")]
    pub knn_k: usize,

    #[arg(long, default_value_t = DEFAULT_FOLDS, env = "FCSSC_FOLDS")]
    pub folds: usize,

    #[arg(long, default_value_t = 0, env = "FCSSC_SEED")]
    pub seed: u64,

    /// Write the JSON report here instead of stdout.
    #[arg(long, env = "FCSSC_OUTPUT")]
    pub output: Option<PathBuf>,

    /// Select once on the full data instead of inside every training fold.
    #[arg(long, env = "FCSSC_SELECT_ONCE")]
    pub select_once: bool,
}

/// Everything a run depends on; echoed verbatim in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: PathBuf,
    pub label_col: Option<String>,
    pub header: bool,
    pub beta: f64,
    pub delta: Option<usize>,
    pub pi: f64,
    pub clustering: Clustering,
    pub k_override: Option<usize>,
    pub knn_k: usize,
    pub folds: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub select_once: bool,
}

impl From<RunArgs> for RunConfig {
    fn from(a: RunArgs) -> Self {
        RunConfig {
            input: a.input,
            label_col: a.label_col,
            header: !a.no_header,
            beta: a.beta,
            delta: a.delta,
            pi: a.pi,
            clustering: a.clustering,
            k_override: a.k,
            knn_k: a.knn_k,
            folds: a.folds,
            seed: a.seed,
            output: a.output,
            select_once: a.select_once,
        }
    }
}

impl RunConfig {
    pub fn label_column(&self) -> LabelColumn {
        self.label_col
            .as_deref()
            .map_or(LabelColumn::Last, LabelColumn::parse)
    }
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// One CSV per method with columns `dataset,accuracy`; the file stem names the method.
    #[arg(required = true, num_args = 2..)]
    pub files: Vec<PathBuf>,

    /// Studentized-range critical value used for the critical difference.
    #[arg(long, env = "FCSSC_Q_ALPHA")]
    pub q_alpha: Option<f64>,

    #[arg(long, env = "FCSSC_OUTPUT")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsConfig {
    pub files: Vec<PathBuf>,
    pub q_alpha: Option<f64>,
    pub output: Option<PathBuf>,
}

impl From<StatsArgs> for StatsConfig {
    fn from(a: StatsArgs) -> Self {
        StatsConfig {
            files: a.files,
            q_alpha: a.q_alpha,
            output: a.output,
        }
    }
}
