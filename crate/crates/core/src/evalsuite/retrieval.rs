use ndarray::{Array2, ArrayView2, Axis};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cca::{self, CcaModel, DEFAULT_EPSILON};
use crate::corrstats::cosine_distance;
use crate::error::{validation, Result};
use crate::repstore::PairedDataset;

/// Which side issues the queries.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// Sentences (left) query images (right).
    #[default]
    TextToImage,
    ImageToText,
}

/// Whether canonical components are scaled by their correlation before
/// cosine ranking.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    #[default]
    Weighted,
    Unweighted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalReport {
    pub k_values: Vec<usize>,
    /// Percentages in `[0, 100]`, one per entry of `k_values`.
    pub recalls: Vec<f64>,
    pub n_queries: usize,
    pub n_candidates: usize,
    pub cca_k: Option<usize>,
    pub epsilon: Option<f64>,
    pub direction: Option<Direction>,
    pub weighting: Option<Weighting>,
}

impl RetrievalReport {
    pub fn recall_at(&self, k: usize) -> Option<f64> {
        self.k_values
            .iter()
            .position(|&kv| kv == k)
            .map(|i| self.recalls[i])
    }
}

/// Recall@k of `queries` against `candidates` by cosine distance.
///
/// `gold[i]` is the candidate row paired with query `i`. Ties in distance
/// rank the lower candidate index first.
pub fn recall_at_k(
    queries: ArrayView2<'_, f64>,
    candidates: ArrayView2<'_, f64>,
    gold: &[usize],
    k_values: &[usize],
) -> Result<RetrievalReport> {
    let (n, m) = (queries.nrows(), candidates.nrows());
    if queries.ncols() != candidates.ncols() {
        return Err(validation!(
            "queries have {} dimensions, candidates {}",
            queries.ncols(),
            candidates.ncols()
        ));
    }
    if n == 0 || m == 0 {
        return Err(validation!(
            "retrieval needs at least one query and one candidate"
        ));
    }
    if gold.len() != n {
        return Err(validation!("{} gold entries for {n} queries", gold.len()));
    }
    if let Some(&g) = gold.iter().find(|&&g| g >= m) {
        return Err(validation!(
            "gold candidate {g} out of range for {m} candidates"
        ));
    }
    if k_values.is_empty() {
        return Err(validation!("no recall cutoffs given"));
    }
    if let Some(&k) = k_values.iter().find(|&&k| k == 0 || k > m) {
        return Err(validation!(
            "cutoff {k} must be between 1 and the {m} candidates"
        ));
    }

    let ranks = (0..n)
        .into_par_iter()
        .map(|i| gold_rank(queries, candidates, i, gold[i]))
        .collect::<Result<Vec<usize>>>()?;

    let recalls = k_values
        .iter()
        .map(|&k| 100.0 * ranks.iter().filter(|&&r| r < k).count() as f64 / n as f64)
        .collect();
    Ok(RetrievalReport {
        k_values: k_values.to_vec(),
        recalls,
        n_queries: n,
        n_candidates: m,
        cca_k: None,
        epsilon: None,
        direction: None,
        weighting: None,
    })
}

/// 0-based position of the gold candidate in the ranked list of query `i`.
fn gold_rank(
    queries: ArrayView2<'_, f64>,
    candidates: ArrayView2<'_, f64>,
    i: usize,
    gold: usize,
) -> Result<usize> {
    let q = queries.row(i);
    let target = cosine_distance(q, candidates.row(gold))?;
    let mut rank = 0;
    for (j, c) in candidates.axis_iter(Axis(0)).enumerate() {
        let d = cosine_distance(q, c)?;
        if d < target || (d == target && j < gold) {
            rank += 1;
        }
    }
    Ok(rank)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalConfig {
    pub epsilon: f64,
    pub cca_k: Option<usize>,
    pub k_values: Vec<usize>,
    pub direction: Direction,
    pub weighting: Weighting,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
            cca_k: None,
            k_values: vec![1, 5, 10],
            direction: Direction::default(),
            weighting: Weighting::default(),
        }
    }
}

/// Fitted model together with the retrieval scores it produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalRun {
    pub model: CcaModel,
    pub report: RetrievalReport,
}

/// Fits CCA on `train` only, projects both sides of `test` and scores
/// retrieval of each pair's counterpart among all test pairs.
pub fn image_retrieval_eval(
    train: &PairedDataset,
    test: &PairedDataset,
    config: &RetrievalConfig,
) -> Result<RetrievalRun> {
    if train.left().dim() != test.left().dim() || train.right().dim() != test.right().dim() {
        return Err(validation!(
            "train dims ({}, {}) differ from test dims ({}, {})",
            train.left().dim(),
            train.right().dim(),
            test.left().dim(),
            test.right().dim()
        ));
    }
    let model = cca::fit(train, config.epsilon, config.cca_k)?;
    let mut text = cca::project_left(&model, test.left().vectors())?;
    let mut image = cca::project_right(&model, test.right().vectors())?;
    if config.weighting == Weighting::Weighted {
        weight_components(&mut text, model.correlations());
        weight_components(&mut image, model.correlations());
    }
    let (queries, candidates) = match config.direction {
        Direction::TextToImage => (&text, &image),
        Direction::ImageToText => (&image, &text),
    };
    let gold: Vec<usize> = (0..test.len()).collect();
    let mut report = recall_at_k(queries.view(), candidates.view(), &gold, &config.k_values)?;
    report.cca_k = Some(model.k());
    report.epsilon = Some(config.epsilon);
    report.direction = Some(config.direction);
    report.weighting = Some(config.weighting);
    Ok(RetrievalRun { model, report })
}

fn weight_components(projected: &mut Array2<f64>, correlations: &[f64]) {
    for (mut column, &w) in projected.axis_iter_mut(Axis(1)).zip(correlations) {
        column *= w;
    }
}
