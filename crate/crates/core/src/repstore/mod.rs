//! Representation sets, pairings and the files they live in.
//!
//! A [`RepresentationSet`] is an `n × d` matrix of sentence or image vectors
//! with one unique string id per row. Two sets aligned row by row form a
//! [`PairedDataset`], the input to CCA fitting and retrieval evaluation.
//!
//! Two on-disk formats are supported:
//!
//! * binary (canonical): `REPS` magic, `u32` version (1), `u32` n, `u32` d,
//!   then `n·d` little-endian `f32` values in row-major order, with the row
//!   ids in a JSON sidecar `<file>.ids.json`;
//! * TSV: one row per line, id in the first column followed by the values.

mod binary;
mod gold;
mod tsv;

use std::collections::{HashMap, HashSet};
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{degenerate, validation, Error, Result};

pub use self::binary::{manifest_path, MAGIC as BINARY_MAGIC, VERSION as BINARY_VERSION};
pub(crate) use self::binary::{read_block, write_block, BlockError};
pub use self::gold::{load_sts_gold, StsGold, StsPair};

/// File format of a representation set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepFormat {
    Binary,
    Tsv,
}

impl RepFormat {
    /// `.tsv` and `.txt` files are TSV, anything else is binary.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("tsv") || ext.eq_ignore_ascii_case("txt") => {
                RepFormat::Tsv
            }
            _ => RepFormat::Binary,
        }
    }
}

/// Named matrix of vectors, one unique id per row.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentationSet {
    name: String,
    ids: Vec<String>,
    vectors: Array2<f64>,
}

impl RepresentationSet {
    pub fn new(name: impl Into<String>, ids: Vec<String>, vectors: Array2<f64>) -> Result<Self> {
        let (n, d) = vectors.dim();
        if n == 0 {
            return Err(validation!("representation set has no rows"));
        }
        if d == 0 {
            return Err(validation!("representation set has zero dimensions"));
        }
        if ids.len() != n {
            return Err(validation!("{} ids for {} rows", ids.len(), n));
        }
        let mut seen = HashSet::with_capacity(n);
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(validation!("duplicate id {id:?}"));
            }
        }
        if let Some(((row, col), value)) = vectors.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(validation!(
                "non-finite value {value} at row {row} ({:?}), column {col}",
                ids[row]
            ));
        }
        Ok(Self {
            name: name.into(),
            ids,
            vectors,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn vectors(&self) -> ArrayView2<'_, f64> {
        self.vectors.view()
    }

    pub fn into_vectors(self) -> Array2<f64> {
        self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.vectors.row(i)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Map from id to row index.
    pub fn id_index(&self) -> HashMap<&str, usize> {
        self.ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect()
    }

    /// Rows for `ids`, in the order given.
    pub fn select(&self, ids: &[String]) -> Result<Self> {
        let index = self.id_index();
        let rows = ids
            .iter()
            .map(|id| {
                index.get(id.as_str()).copied().ok_or_else(|| {
                    Error::Alignment(format!("id {id:?} not found in set {:?}", self.name))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(
            self.name.clone(),
            ids.to_vec(),
            self.vectors.select(Axis(0), &rows),
        )
    }

    /// Copy with every row scaled to unit Euclidean norm.
    pub fn l2_normalized(&self) -> Result<Self> {
        let mut vectors = self.vectors.clone();
        for (i, mut row) in vectors.axis_iter_mut(Axis(0)).enumerate() {
            let norm = row.dot(&row).sqrt();
            if norm == 0.0 {
                return Err(degenerate!(
                    "row {:?} of set {:?} has zero norm",
                    self.ids[i],
                    self.name
                ));
            }
            row /= norm;
        }
        Ok(Self {
            name: self.name.clone(),
            ids: self.ids.clone(),
            vectors,
        })
    }
}

/// Reads a representation set. The set is named after the file stem.
pub fn load_representation_set(path: &Path, format: RepFormat) -> Result<RepresentationSet> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let (ids, vectors) = match format {
        RepFormat::Binary => binary::load(path)?,
        RepFormat::Tsv => tsv::load(path)?,
    };
    RepresentationSet::new(name, ids, vectors)
}

pub fn save_representation_set(
    set: &RepresentationSet,
    path: &Path,
    format: RepFormat,
) -> Result<()> {
    match format {
        RepFormat::Binary => binary::save(set, path),
        RepFormat::Tsv => tsv::save(set, path),
    }
}

/// Per-token encoder states of one sentence with its padding mask.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenSequence {
    tokens: Array2<f64>,
    mask: Vec<bool>,
}

impl TokenSequence {
    pub fn new(tokens: Array2<f64>, mask: Vec<bool>) -> Result<Self> {
        let (len, dim) = tokens.dim();
        if len == 0 || dim == 0 {
            return Err(validation!(
                "token sequence must be non-empty, got {len}×{dim}"
            ));
        }
        if mask.len() != len {
            return Err(validation!(
                "mask has {} entries for {} tokens",
                mask.len(),
                len
            ));
        }
        if tokens.iter().any(|v| !v.is_finite()) {
            return Err(validation!("token states contain non-finite values"));
        }
        Ok(Self { tokens, mask })
    }

    /// Sequence with every token unmasked.
    pub fn unmasked(tokens: Array2<f64>) -> Result<Self> {
        let mask = vec![true; tokens.nrows()];
        Self::new(tokens, mask)
    }

    pub fn tokens(&self) -> ArrayView2<'_, f64> {
        self.tokens.view()
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }
}

/// Arithmetic mean of the unmasked token states.
pub fn mean_pool(seq: &TokenSequence) -> Result<Array1<f64>> {
    let mut sum = Array1::<f64>::zeros(seq.tokens.ncols());
    let mut count = 0usize;
    for (row, &keep) in seq.tokens.axis_iter(Axis(0)).zip(&seq.mask) {
        if keep {
            sum += &row;
            count += 1;
        }
    }
    if count == 0 {
        return Err(degenerate!("every token of the sequence is masked"));
    }
    sum /= count as f64;
    Ok(sum)
}

/// Bijection between ids of two sets.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdMap {
    forward: HashMap<String, String>,
}

impl IdMap {
    /// Maps every id to itself.
    pub fn identity<S: AsRef<str>>(ids: &[S]) -> Self {
        Self {
            forward: ids
                .iter()
                .map(|id| (id.as_ref().to_owned(), id.as_ref().to_owned()))
                .collect(),
        }
    }

    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut forward = HashMap::new();
        let mut targets = HashSet::new();
        for (a, b) in pairs {
            if !targets.insert(b.clone()) {
                return Err(validation!(
                    "id map is not injective: {b:?} is mapped to twice"
                ));
            }
            if let Some(previous) = forward.insert(a.clone(), b) {
                return Err(validation!(
                    "id map lists {a:?} twice (already mapped to {previous:?})"
                ));
            }
        }
        Ok(Self { forward })
    }

    /// Reads a two-column TSV of `left_id<TAB>right_id` lines.
    pub fn load_tsv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut pairs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            match (fields.next(), fields.next(), fields.next()) {
                (Some(a), Some(b), None) => pairs.push((a.to_owned(), b.to_owned())),
                _ => {
                    return Err(Error::format(
                        path,
                        format!("line {}: expected two tab-separated ids", lineno + 1),
                    ))
                }
            }
        }
        Self::from_pairs(pairs)
    }

    pub fn get(&self, left: &str) -> Option<&str> {
        self.forward.get(left).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }
}

/// Two representation sets aligned by row index.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedDataset {
    left: RepresentationSet,
    right: RepresentationSet,
}

impl PairedDataset {
    pub fn new(left: RepresentationSet, right: RepresentationSet) -> Result<Self> {
        if left.len() != right.len() {
            return Err(validation!(
                "paired sets differ in length: {} vs {}",
                left.len(),
                right.len()
            ));
        }
        if left.len() < 2 {
            return Err(validation!(
                "a paired dataset needs at least 2 pairs, got {}",
                left.len()
            ));
        }
        Ok(Self { left, right })
    }

    pub fn left(&self) -> &RepresentationSet {
        &self.left
    }

    pub fn right(&self) -> &RepresentationSet {
        &self.right
    }

    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    /// Pair ids; the left set's ids.
    pub fn ids(&self) -> &[String] {
        self.left.ids()
    }

    pub fn into_parts(self) -> (RepresentationSet, RepresentationSet) {
        (self.left, self.right)
    }

    fn take_rows(&self, rows: &[usize]) -> Result<Self> {
        let pick = |set: &RepresentationSet| {
            RepresentationSet::new(
                set.name.clone(),
                rows.iter().map(|&i| set.ids[i].clone()).collect(),
                set.vectors.select(Axis(0), rows),
            )
        };
        Self::new(pick(&self.left)?, pick(&self.right)?)
    }
}

/// Pairs rows of `a` with rows of `b` through `id_map`, in `a`'s row order.
pub fn align_pairs(
    a: &RepresentationSet,
    b: &RepresentationSet,
    id_map: &IdMap,
) -> Result<PairedDataset> {
    let a_index = a.id_index();
    let b_index = b.id_index();
    for (left, right) in &id_map.forward {
        if !a_index.contains_key(left.as_str()) {
            return Err(Error::Alignment(format!(
                "id {left:?} from the id map is missing in set {:?}",
                a.name
            )));
        }
        if !b_index.contains_key(right.as_str()) {
            return Err(Error::Alignment(format!(
                "id {right:?} from the id map is missing in set {:?}",
                b.name
            )));
        }
    }
    let (a_rows, b_rows): (Vec<usize>, Vec<usize>) = a
        .ids
        .iter()
        .enumerate()
        .filter_map(|(i, id)| id_map.get(id).map(|target| (i, b_index[target])))
        .unzip();
    if a_rows.len() < 2 {
        return Err(validation!(
            "alignment produced {} pairs, at least 2 are required",
            a_rows.len()
        ));
    }
    let left = RepresentationSet::new(
        a.name.clone(),
        a_rows.iter().map(|&i| a.ids[i].clone()).collect(),
        a.vectors.select(Axis(0), &a_rows),
    )?;
    let right = RepresentationSet::new(
        b.name.clone(),
        b_rows.iter().map(|&i| b.ids[i].clone()).collect(),
        b.vectors.select(Axis(0), &b_rows),
    )?;
    PairedDataset::new(left, right)
}

/// Partitions pairs into `(train, test)`; `test_ids` name left-side ids.
pub fn split(pairs: &PairedDataset, test_ids: &[String]) -> Result<(PairedDataset, PairedDataset)> {
    if test_ids.is_empty() {
        return Err(validation!("no test ids given"));
    }
    let index = pairs.left.id_index();
    let mut is_test = vec![false; pairs.len()];
    for id in test_ids {
        let &row = index.get(id.as_str()).ok_or_else(|| {
            Error::Alignment(format!("test id {id:?} is not among the paired ids"))
        })?;
        is_test[row] = true;
    }
    let (test_rows, train_rows): (Vec<usize>, Vec<usize>) =
        (0..pairs.len()).partition(|&i| is_test[i]);
    if train_rows.len() < 2 || test_rows.len() < 2 {
        return Err(validation!(
            "split leaves {} train and {} test pairs, both need at least 2",
            train_rows.len(),
            test_rows.len()
        ));
    }
    Ok((pairs.take_rows(&train_rows)?, pairs.take_rows(&test_rows)?))
}

/// Reads a newline-separated id list, ignoring blank lines.
pub fn load_id_list(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect())
}
