use ndarray::Axis;
use serde::{Deserialize, Serialize};

use crate::cca::{project_left, CcaModel};
use crate::corrstats::{cosine_distance, spearman};
use crate::error::{validation, Error, Result};
use crate::repstore::{RepresentationSet, StsGold};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StsMode {
    /// Cosine distance on the vectors as given.
    #[default]
    Raw,
    /// Cosine distance after projecting through a CCA model's left side.
    CcaProjected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StsReport {
    pub spearman: f64,
    pub n_pairs: usize,
    pub mode: StsMode,
}

/// Spearman correlation between negated cosine distances of each gold pair
/// and the human scores.
pub fn sts_eval(
    reps: &RepresentationSet,
    gold: &StsGold,
    mode: StsMode,
    model: Option<&CcaModel>,
) -> Result<StsReport> {
    let index = reps.id_index();
    let lookup = |id: &str| {
        index.get(id).copied().ok_or_else(|| {
            Error::Alignment(format!(
                "gold id {id:?} is missing from set {:?}",
                reps.name()
            ))
        })
    };
    let mut rows_a = Vec::with_capacity(gold.len());
    let mut rows_b = Vec::with_capacity(gold.len());
    for pair in gold.pairs() {
        rows_a.push(lookup(&pair.id_a)?);
        rows_b.push(lookup(&pair.id_b)?);
    }

    let mut a = reps.vectors().select(Axis(0), &rows_a);
    let mut b = reps.vectors().select(Axis(0), &rows_b);
    if mode == StsMode::CcaProjected {
        let model = model.ok_or_else(|| validation!("projected STS needs a CCA model"))?;
        if model.dim_left() != reps.dim() {
            return Err(validation!(
                "model expects {}-dimensional left vectors, set {:?} has {}",
                model.dim_left(),
                reps.name(),
                reps.dim()
            ));
        }
        a = project_left(model, a.view())?;
        b = project_left(model, b.view())?;
    }

    let similarities = a
        .rows()
        .into_iter()
        .zip(b.rows())
        .map(|(u, v)| cosine_distance(u, v).map(|d| -d))
        .collect::<Result<Vec<f64>>>()?;
    Ok(StsReport {
        spearman: spearman(&similarities, &gold.scores())?,
        n_pairs: gold.len(),
        mode,
    })
}
