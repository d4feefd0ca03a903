use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};

/// One human-annotated sentence pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StsPair {
    pub id_a: String,
    pub id_b: String,
    pub score: f64,
}

/// Gold similarity judgements for an STS test set.
#[derive(Debug, Clone, PartialEq)]
pub struct StsGold {
    pairs: Vec<StsPair>,
}

impl StsGold {
    pub fn new(pairs: Vec<StsPair>) -> Result<Self> {
        if pairs.len() < 2 {
            return Err(validation!(
                "STS gold needs at least 2 pairs, got {}",
                pairs.len()
            ));
        }
        if let Some(p) = pairs.iter().find(|p| !p.score.is_finite()) {
            return Err(validation!(
                "non-finite gold score for ({:?}, {:?})",
                p.id_a,
                p.id_b
            ));
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[StsPair] {
        &self.pairs
    }

    pub fn scores(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.score).collect()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Reads `id_a<TAB>id_b<TAB>score` lines. A leading header row naming the
/// columns is skipped.
pub fn load_sts_gold(path: &Path) -> Result<StsGold> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut pairs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::format(
                path,
                format!(
                    "line {}: expected 3 columns, found {}",
                    lineno + 1,
                    fields.len()
                ),
            ));
        }
        let score = match fields[2].trim().parse::<f64>() {
            Ok(score) => score,
            Err(_) if pairs.is_empty() && fields[2].trim().eq_ignore_ascii_case("score") => {
                continue
            }
            Err(_) => {
                return Err(Error::format(
                    path,
                    format!("line {}: cannot parse score {:?}", lineno + 1, fields[2]),
                ))
            }
        };
        pairs.push(StsPair {
            id_a: fields[0].to_owned(),
            id_b: fields[1].to_owned(),
            score,
        });
    }
    StsGold::new(pairs)
}
