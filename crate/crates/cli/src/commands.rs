use std::fs::{self, File};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use ndarray::{concatenate, Array2, Axis};
use repeval_core::cca::{self, load_model, save_model};
use repeval_core::dcorr::{dcorr_matrix, DcorrOptions, Subsample};
use repeval_core::evalsuite::{
    image_retrieval_eval, metric_correlation_report, sts_eval, MetricsTable, RetrievalConfig,
    RetrievalReport, Weighting, DEFAULT_METRIC_PAIRS,
};
use repeval_core::repstore::{
    align_pairs, load_id_list, load_representation_set, load_sts_gold, mean_pool,
    save_representation_set, split,
};
use repeval_core::synth::{self, Nonlinearity, SynthSpec, RNG_ALGORITHM};
use repeval_core::{
    Error, IdMap, PairedDataset, RepFormat, RepresentationSet, StsMode, TokenSequence,
};
use serde::{Deserialize, Serialize};

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::report::Report;

pub fn run(command: &Command) -> CliResult<()> {
    let name = command.name();
    match command {
        Command::Pool(args) => pool(name, args),
        Command::FitCca(args) => fit_cca(name, args),
        Command::EvalRetrieval(args) => eval_retrieval(name, args),
        Command::EvalSts(args) => eval_sts(name, args),
        Command::DcorrMatrix(args) => dcorr(name, args),
        Command::CorrelateMetrics(args) => correlate_metrics(name, args),
        Command::Synth(args) => synth(name, args),
    }
}

/// Writes to `path`, or to stdout when there is none.
fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|()| out.flush())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

fn load_set(path: &Path, normalize: Normalize) -> CliResult<RepresentationSet> {
    let set = load_representation_set(path, RepFormat::from_path(path))?;
    Ok(match normalize {
        Normalize::None => set,
        Normalize::L2 => set.l2_normalized()?,
    })
}

fn load_pairs(args: &PairArgs) -> CliResult<PairedDataset> {
    let left = load_set(&args.left, args.normalize)?;
    let right = load_set(&args.right, args.normalize)?;
    let map = match &args.pairs {
        Some(path) => IdMap::load_tsv(path)?,
        None => IdMap::identity(left.ids()),
    };
    Ok(align_pairs(&left, &right, &map)?)
}

#[derive(Deserialize)]
struct PoolRecord {
    id: String,
    tokens: Vec<Vec<f64>>,
    mask: Option<Vec<bool>>,
}

fn pool(command: &str, args: &PoolArgs) -> CliResult<()> {
    let format_error = |message: String| Error::Format {
        path: args.input.clone(),
        message,
    };
    let file = File::open(&args.input).map_err(|e| CliError::io(&args.input, e))?;
    let mut ids = Vec::new();
    let mut rows: Vec<f64> = Vec::new();
    let mut dim = None;
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(&args.input, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: PoolRecord = serde_json::from_str(&line)
            .map_err(|e| format_error(format!("line {}: {e}", lineno + 1)))?;
        let width = record.tokens.first().map_or(0, Vec::len);
        if record.tokens.iter().any(|t| t.len() != width) {
            return Err(format_error(format!("line {}: ragged token vectors", lineno + 1)).into());
        }
        if *dim.get_or_insert(width) != width {
            return Err(format_error(format!(
                "line {}: {width}-dimensional tokens after {}-dimensional ones",
                lineno + 1,
                dim.unwrap_or_default()
            ))
            .into());
        }
        let tokens = Array2::from_shape_vec((record.tokens.len(), width), record.tokens.concat())
            .map_err(|e| format_error(format!("line {}: {e}", lineno + 1)))?;
        let seq = match record.mask {
            Some(mask) => TokenSequence::new(tokens, mask)?,
            None => TokenSequence::unmasked(tokens)?,
        };
        rows.extend(mean_pool(&seq)?);
        ids.push(record.id);
    }
    let n = ids.len();
    let dim = dim.unwrap_or(0);
    let vectors = Array2::from_shape_vec((n, dim), rows).expect("rows have uniform width");
    let name = match &args.name {
        Some(name) => name.clone(),
        None => file_stem(&args.out),
    };
    let set = RepresentationSet::new(name, ids, vectors)?;
    save_representation_set(&set, &args.out, RepFormat::from_path(&args.out))?;

    #[derive(Serialize)]
    struct Pooled<'a> {
        name: &'a str,
        n: usize,
        dim: usize,
        out: &'a Path,
    }
    let result = Pooled {
        name: set.name(),
        n: set.len(),
        dim: set.dim(),
        out: &args.out,
    };
    emit(
        args.report.report.as_deref(),
        &Report::new(command, args, result).to_json(),
    )
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "set".to_owned(), |s| s.to_string_lossy().into_owned())
}

fn fit_cca(command: &str, args: &FitCcaArgs) -> CliResult<()> {
    let data = load_pairs(&args.pairs)?;
    let train = match &args.test_ids {
        Some(path) => split(&data, &load_id_list(path)?)?.0,
        None => data,
    };
    let model = cca::fit(&train, args.pairs.epsilon, args.pairs.cca_k)?;
    save_model(&model, &args.out)?;

    #[derive(Serialize)]
    struct Fitted<'a> {
        n_train: usize,
        dim_left: usize,
        dim_right: usize,
        k: usize,
        correlations: &'a [f64],
        out: &'a Path,
    }
    let result = Fitted {
        n_train: train.len(),
        dim_left: model.dim_left(),
        dim_right: model.dim_right(),
        k: model.k(),
        correlations: model.correlations(),
        out: &args.out,
    };
    emit(
        args.report.report.as_deref(),
        &Report::new(command, args, result).to_json(),
    )
}

fn eval_retrieval(command: &str, args: &RetrievalArgs) -> CliResult<()> {
    let data = load_pairs(&args.pairs)?;
    let (train, test) = split(&data, &load_id_list(&args.test_ids)?)?;
    let config = RetrievalConfig {
        epsilon: args.pairs.epsilon,
        cca_k: args.pairs.cca_k,
        k_values: args.k_values.clone(),
        direction: args.direction.into(),
        weighting: if args.unweighted {
            Weighting::Unweighted
        } else {
            Weighting::Weighted
        },
    };
    let run = image_retrieval_eval(&train, &test, &config)?;
    if let Some(path) = &args.model_out {
        save_model(&run.model, path)?;
    }

    #[derive(Serialize)]
    struct Scored {
        n_train: usize,
        n_test: usize,
        correlations: Vec<f64>,
        #[serde(flatten)]
        report: RetrievalReport,
    }
    let result = Scored {
        n_train: train.len(),
        n_test: test.len(),
        correlations: run.model.correlations().to_vec(),
        report: run.report,
    };
    emit(
        args.out.as_deref(),
        &Report::new(command, args, result).to_json(),
    )
}

fn eval_sts(command: &str, args: &StsArgs) -> CliResult<()> {
    let mode = StsMode::from(args.mode);
    let model = match (mode, &args.model) {
        (StsMode::CcaProjected, Some(path)) => Some(load_model(path)?),
        (StsMode::CcaProjected, None) => {
            return Err(CliError::Invalid(
                "--mode cca-projected requires --model".into(),
            ))
        }
        (StsMode::Raw, Some(_)) => {
            return Err(CliError::Invalid(
                "--model only applies with --mode cca-projected".into(),
            ))
        }
        (StsMode::Raw, None) => None,
    };
    let reps = load_set(&args.reps, Normalize::None)?;
    let gold = load_sts_gold(&args.gold)?;
    let result = sts_eval(&reps, &gold, mode, model.as_ref())?;
    emit(
        args.out.as_deref(),
        &Report::new(command, args, result).to_json(),
    )
}

fn dcorr(command: &str, args: &DcorrArgs) -> CliResult<()> {
    if !args.labels.is_empty() && args.labels.len() != args.sets.len() {
        return Err(CliError::Invalid(format!(
            "{} labels for {} sets",
            args.labels.len(),
            args.sets.len()
        )));
    }
    let mut sets = Vec::with_capacity(args.sets.len());
    for (i, path) in args.sets.iter().enumerate() {
        let label = args
            .labels
            .get(i)
            .cloned()
            .unwrap_or_else(|| file_stem(path));
        sets.push(load_set(path, args.normalize)?.with_name(label));
    }
    // every set is reordered to one id list so rows describe the same sentences
    let ids = match &args.ids {
        Some(path) => load_id_list(path)?,
        None => sets[0].ids().to_vec(),
    };
    let sets = sets
        .iter()
        .map(|s| s.select(&ids))
        .collect::<Result<Vec<_>, _>>()?;
    let options = DcorrOptions {
        estimator: args.estimator.into(),
        max_n: args.max_n,
        subsample: args.subsample.map(|size| Subsample {
            size,
            seed: args.seed,
        }),
    };
    let matrix = dcorr_matrix(&sets, &options)?;
    let text = match args.format {
        Format::Json => Report::new(command, args, &matrix).to_json(),
        Format::Tsv => matrix.to_tsv(),
    };
    emit(args.out.as_deref(), &text)
}

fn correlate_metrics(command: &str, args: &MetricsArgs) -> CliResult<()> {
    let table = MetricsTable::load(&args.table)?;
    let pairs: Vec<(String, String)> = if args.pairs.is_empty() {
        DEFAULT_METRIC_PAIRS
            .iter()
            .map(|&(x, y)| (x.to_owned(), y.to_owned()))
            .collect()
    } else {
        args.pairs
            .iter()
            .map(|p| match p.split_once('~') {
                Some((x, y)) if !x.is_empty() && !y.is_empty() => Ok((x.to_owned(), y.to_owned())),
                _ => Err(CliError::Invalid(format!(
                    "pair {p:?} is not of the form x~y"
                ))),
            })
            .collect::<CliResult<_>>()?
    };
    let report = metric_correlation_report(&table, &pairs)?;
    if let Some(path) = &args.scatter {
        emit(Some(path), &report.scatter_tsv())?;
    }
    let text = match args.format {
        Format::Json => Report::new(command, args, &report).to_json(),
        Format::Tsv => report.scatter_tsv(),
    };
    emit(args.out.as_deref(), &text)
}

#[derive(Serialize)]
struct SynthManifest<'a> {
    kind: SynthKind,
    spec: &'a SynthSpec,
    rng_algorithm: &'static str,
    n: usize,
    files: Vec<PathBuf>,
}

fn synth(command: &str, args: &SynthArgs) -> CliResult<()> {
    let spec = SynthSpec {
        n: args.n,
        dim_left: args.dim_left,
        dim_right: args.dim_right,
        seed: args.seed,
        rho: args.rho.clone(),
        snr: args.snr,
        nonlinearity: (args.kind == SynthKind::Nonlinear).then_some(Nonlinearity::Square),
    };
    let mut test_ids = None;
    let data = match args.kind {
        SynthKind::GaussianCca => synth::gaussian_cca_pair(&spec)?,
        SynthKind::Independent => synth::independent_pair(&spec)?,
        SynthKind::Nonlinear => synth::nonlinear_pair(&spec)?,
        SynthKind::PlantedRetrieval => {
            let (train, test) = synth::planted_retrieval(&spec)?;
            test_ids = Some(test.ids().to_vec());
            rejoin(train, test)?
        }
    };

    fs::create_dir_all(&args.out_dir).map_err(|e| CliError::io(&args.out_dir, e))?;
    let left = args.out_dir.join("left.bin");
    let right = args.out_dir.join("right.bin");
    save_representation_set(data.left(), &left, RepFormat::Binary)?;
    save_representation_set(data.right(), &right, RepFormat::Binary)?;
    let mut files = vec![left, right];
    if let Some(ids) = test_ids {
        let path = args.out_dir.join("test_ids.txt");
        let mut text = ids.join("\n");
        text.push('\n');
        emit(Some(&path), &text)?;
        files.push(path);
    }
    let manifest = SynthManifest {
        kind: args.kind,
        spec: &spec,
        rng_algorithm: RNG_ALGORITHM,
        n: data.len(),
        files,
    };
    let manifest_path = args.out_dir.join("synth.json");
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    emit(Some(&manifest_path), &text)?;
    emit(
        args.report.report.as_deref(),
        &Report::new(command, args, &manifest).to_json(),
    )
}

/// Train rows followed by test rows, which is the generator's sample order.
fn rejoin(train: PairedDataset, test: PairedDataset) -> CliResult<PairedDataset> {
    let (train_left, train_right) = train.into_parts();
    let (test_left, test_right) = test.into_parts();
    let join = |a: RepresentationSet, b: RepresentationSet| -> CliResult<RepresentationSet> {
        let ids = [a.ids(), b.ids()].concat();
        let vectors = concatenate(Axis(0), &[a.vectors(), b.vectors()]).expect("same width");
        Ok(RepresentationSet::new(a.name().to_owned(), ids, vectors)?)
    };
    Ok(PairedDataset::new(
        join(train_left, test_left)?,
        join(train_right, test_right)?,
    )?)
}
