use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Serialize, Serializer};

use specclust::cluster::{Distance, Linkage};
use specclust::kestimator::EstimatorConfig;
use specclust::synth::Balance;
use specclust::sweep::Algo;

#[derive(Debug, Parser)]
#[command(name = "specclust", version, about = "Estimate cluster counts, cluster and evaluate embedding collections")]
pub struct Cli {
    /// Worker threads (default: all cores). Never changes results.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// Log progress and warnings to standard error.
    #[arg(long, short, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a labelled spherical mixture.
    Gen(GenArgs),
    /// Estimate the number of clusters.
    EstimateK(EstimateArgs),
    /// Cluster with K-Means or agglomerative clustering.
    Cluster(ClusterArgs),
    /// Score an assignment with intrinsic and (given labels) extrinsic metrics.
    Evaluate(EvaluateArgs),
    /// Dump the Laplacian spectrum, spectral differences and threshold as CSV.
    Spectrum(SpectrumArgs),
    /// Score a grid of clusterings and correlate intrinsic with extrinsic metrics.
    Sweep(SweepArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Gen(_) => "gen",
            Command::EstimateK(_) => "estimate-k",
            Command::Cluster(_) => "cluster",
            Command::Evaluate(_) => "evaluate",
            Command::Spectrum(_) => "spectrum",
            Command::Sweep(_) => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum BalanceArg {
    Equal,
    Dirichlet,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Emb1,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum AlgoArg {
    Kmeans,
    Hac,
}

impl From<AlgoArg> for Algo {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Kmeans => Algo::Kmeans,
            AlgoArg::Hac => Algo::Hac,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum LinkageArg {
    Average,
    Complete,
    Single,
}

impl From<LinkageArg> for Linkage {
    fn from(l: LinkageArg) -> Self {
        match l {
            LinkageArg::Average => Linkage::Average,
            LinkageArg::Complete => Linkage::Complete,
            LinkageArg::Single => Linkage::Single,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum DistanceArg {
    Cosine,
    Euclidean,
}

impl From<DistanceArg> for Distance {
    fn from(d: DistanceArg) -> Self {
        match d {
            DistanceArg::Cosine => Distance::Cosine,
            DistanceArg::Euclidean => Distance::Euclidean,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SpaceArg {
    Raw,
    Normalized,
}

/// `auto` or a positive integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KArg {
    Auto,
    Fixed(usize),
}

impl FromStr for KArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(KArg::Auto);
        }
        match s.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(KArg::Fixed(k)),
            _ => Err(format!("expected `auto` or a positive integer, got {s:?}")),
        }
    }
}

impl Serialize for KArg {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            KArg::Auto => s.serialize_str("auto"),
            KArg::Fixed(k) => s.serialize_u64(*k as u64),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EstimatorArgs {
    /// Maximum subset size per replicate.
    #[arg(long, default_value_t = 1000)]
    pub tau: usize,
    /// Moving-average window.
    #[arg(long, default_value_t = 3)]
    pub w: usize,
    /// Estimate used when no spectral jump is found.
    #[arg(long, default_value_t = 5)]
    pub k_default: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub epsilon: f64,
    /// Z-score the off-diagonal similarities before building the Laplacian.
    #[arg(long)]
    pub zscore: bool,
}

impl EstimatorArgs {
    pub fn config(&self, seed: u64) -> EstimatorConfig {
        EstimatorConfig {
            tau: self.tau,
            w: self.w,
            k_default: self.k_default,
            epsilon: self.epsilon,
            use_zscore: self.zscore,
            seed,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    /// Per-coordinate noise standard deviation.
    #[arg(long)]
    pub sigma: f64,
    /// Minimum pairwise center angle in radians.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_6)]
    pub min_sep: f64,
    #[arg(long, value_enum, default_value_t = BalanceArg::Equal)]
    pub balance: BalanceArg,
    /// Dirichlet concentration for `--balance dirichlet`.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = FormatArg::Emb1)]
    pub format: FormatArg,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

impl GenArgs {
    pub fn balance(&self) -> Balance {
        match self.balance {
            BalanceArg::Equal => Balance::Equal,
            BalanceArg::Dirichlet => Balance::Dirichlet { alpha: self.alpha },
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EstimateArgs {
    /// Embeddings (EMB1 or CSV).
    #[arg(long)]
    pub input: PathBuf,
    /// Optional ground-truth labels for the relative error.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ClusterArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = AlgoArg::Hac)]
    pub algo: AlgoArg,
    /// Cluster count, or `auto` to run the estimator first.
    #[arg(long, default_value = "auto")]
    pub k: KArg,
    /// Assignment output, one cluster id per line.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional ground-truth labels; adds extrinsic scores to the report.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    #[arg(long, default_value_t = 10)]
    pub n_init: usize,
    #[arg(long, default_value_t = 300)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = LinkageArg::Average)]
    pub linkage: LinkageArg,
    #[arg(long, value_enum, default_value_t = DistanceArg::Cosine)]
    pub distance: DistanceArg,
    /// Run K-Means on the raw vectors instead of L2-normalized ones.
    #[arg(long)]
    pub raw: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub assignment: PathBuf,
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = DistanceArg::Euclidean)]
    pub silhouette_distance: DistanceArg,
    /// Vector space for silhouette, DBI and CHI.
    #[arg(long, value_enum, default_value_t = SpaceArg::Raw)]
    pub space: SpaceArg,
    /// Use the z-score rectified similarity for the Cohesion Ratio.
    #[arg(long)]
    pub zscore: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// CSV output path.
    #[arg(long)]
    pub csv: PathBuf,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    /// Decompose the full input even when it exceeds `--tau` points.
    #[arg(long)]
    pub force_full: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    /// Per-run table output.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [AlgoArg::Kmeans, AlgoArg::Hac])]
    pub algos: Vec<AlgoArg>,
    #[arg(long, default_value_t = 2)]
    pub k_min: usize,
    #[arg(long, default_value_t = 8)]
    pub k_max: usize,
    /// Comma-separated reassignment rates.
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.1, 0.2, 0.3, 0.5])]
    pub noise: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    pub n_init: usize,
    #[arg(long, value_enum, default_value_t = LinkageArg::Average)]
    pub linkage: LinkageArg,
    #[arg(long, value_enum, default_value_t = DistanceArg::Cosine)]
    pub hac_distance: DistanceArg,
    #[arg(long, value_enum, default_value_t = DistanceArg::Euclidean)]
    pub silhouette_distance: DistanceArg,
    #[arg(long)]
    pub zscore: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}
