use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use repeval_core::{dcorr, evalsuite};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "repeval",
    version,
    about = "Evaluate sentence representations: CCA retrieval, STS, distance correlation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mean-pool token states (JSONL) into a representation set.
    Pool(PoolArgs),
    /// Fit CCA on aligned left/right sets and save the model.
    FitCca(FitCcaArgs),
    /// Fit CCA on the train split, score retrieval on the test split.
    EvalRetrieval(RetrievalArgs),
    /// Spearman correlation of cosine similarities with STS gold scores.
    EvalSts(StsArgs),
    /// Pairwise distance correlation between representation sets.
    DcorrMatrix(DcorrArgs),
    /// Pearson correlation between task metrics across models.
    CorrelateMetrics(MetricsArgs),
    /// Write a seeded synthetic paired dataset.
    Synth(SynthArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Pool(_) => "pool",
            Command::FitCca(_) => "fit-cca",
            Command::EvalRetrieval(_) => "eval-retrieval",
            Command::EvalSts(_) => "eval-sts",
            Command::DcorrMatrix(_) => "dcorr-matrix",
            Command::CorrelateMetrics(_) => "correlate-metrics",
            Command::Synth(_) => "synth",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalize {
    None,
    L2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionArg {
    TextToImage,
    ImageToText,
}

impl From<DirectionArg> for evalsuite::Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::TextToImage => Self::TextToImage,
            DirectionArg::ImageToText => Self::ImageToText,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StsModeArg {
    Raw,
    CcaProjected,
}

impl From<StsModeArg> for evalsuite::StsMode {
    fn from(m: StsModeArg) -> Self {
        match m {
            StsModeArg::Raw => Self::Raw,
            StsModeArg::CcaProjected => Self::CcaProjected,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorArg {
    Biased,
    BiasCorrected,
}

impl From<EstimatorArg> for dcorr::Estimator {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::Biased => Self::Biased,
            EstimatorArg::BiasCorrected => Self::BiasCorrected,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SynthKind {
    GaussianCca,
    Independent,
    Nonlinear,
    PlantedRetrieval,
}

/// Where the JSON report goes for commands whose main output is a file.
#[derive(Debug, Clone, Args, Serialize)]
pub struct ReportArgs {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PoolArgs {
    /// JSONL file, one object per sentence: {"id", "tokens": [[...]], "mask": [...]}.
    #[arg(long)]
    pub input: PathBuf,
    /// Output representation set (.tsv/.txt for TSV, anything else binary).
    #[arg(long)]
    pub out: PathBuf,
    /// Set name recorded in the report (defaults to the output file stem).
    #[arg(long)]
    pub name: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub report: ReportArgs,
}

/// Inputs shared by the CCA commands.
#[derive(Debug, Clone, Args, Serialize)]
pub struct PairArgs {
    /// Sentence-side representation set.
    #[arg(long)]
    pub left: PathBuf,
    /// Image-side representation set.
    #[arg(long)]
    pub right: PathBuf,
    /// Two-column TSV mapping left ids to right ids (default: identical ids).
    #[arg(long)]
    pub pairs: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Normalize::None)]
    pub normalize: Normalize,
    /// Ridge factor, relative to the mean covariance diagonal.
    #[arg(long, default_value_t = repeval_core::cca::DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Number of canonical components (default min(d_left, d_right, n_train - 1)).
    #[arg(long)]
    pub cca_k: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitCcaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub pairs: PairArgs,
    /// Left ids held out from fitting, one per line.
    #[arg(long)]
    pub test_ids: Option<PathBuf>,
    /// Output model file.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub report: ReportArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RetrievalArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub pairs: PairArgs,
    /// Left ids of the test split, one per line; all other pairs train.
    #[arg(long)]
    pub test_ids: PathBuf,
    /// Recall cutoffs (repeatable).
    #[arg(long = "k", default_values_t = [1usize, 5, 10])]
    pub k_values: Vec<usize>,
    #[arg(long, value_enum, default_value_t = DirectionArg::TextToImage)]
    pub direction: DirectionArg,
    /// Rank by cosine on raw canonical components instead of
    /// correlation-weighted ones.
    #[arg(long)]
    pub unweighted: bool,
    /// Also save the fitted model.
    #[arg(long)]
    pub model_out: Option<PathBuf>,
    /// Report destination (default stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct StsArgs {
    /// Representation set holding every sentence named in the gold file.
    #[arg(long)]
    pub reps: PathBuf,
    /// TSV with columns id_a, id_b, score.
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long, value_enum, default_value_t = StsModeArg::Raw)]
    pub mode: StsModeArg,
    /// CCA model, required with --mode cca-projected.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DcorrArgs {
    /// Representation set (repeatable).
    #[arg(long = "set", required = true)]
    pub sets: Vec<PathBuf>,
    /// Label per set, in order (default: file stems).
    #[arg(long = "label")]
    pub labels: Vec<String>,
    /// Restrict every set to these ids, in this order (one per line).
    #[arg(long)]
    pub ids: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Normalize::None)]
    pub normalize: Normalize,
    #[arg(long, value_enum, default_value_t = EstimatorArg::BiasCorrected)]
    pub estimator: EstimatorArg,
    /// Largest sample size processed without --subsample.
    #[arg(long, default_value_t = 20_000)]
    pub max_n: usize,
    /// Seeded row subsample size for sets larger than --max-n.
    #[arg(long)]
    pub subsample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MetricsArgs {
    /// TSV with a header: model, optional arch, metric columns.
    #[arg(long)]
    pub table: PathBuf,
    /// Column pair as x~y (repeatable; default bleu~img_r10, bleu~sts, bleu~train_size).
    #[arg(long = "pair")]
    pub pairs: Vec<String>,
    /// json: correlation report; tsv: scatter data.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Additionally write the scatter TSV here.
    #[arg(long)]
    pub scatter: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub kind: SynthKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub dim_left: usize,
    #[arg(long)]
    pub dim_right: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Planted canonical correlations (comma separated or repeated).
    #[arg(long, value_delimiter = ',')]
    pub rho: Vec<f64>,
    /// Signal-to-noise ratio (omit for noise-free data).
    #[arg(long)]
    pub snr: Option<f64>,
    /// Output directory for left.bin, right.bin and synth.json.
    #[arg(long)]
    pub out_dir: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub report: ReportArgs,
}
