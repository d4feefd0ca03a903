//! CCA model files.
//!
//! Layout: `CCAM` magic, `u32` version, `u32` header length, a JSON header
//! with dims, k, epsilon and the correlations, then four `REPS` blocks:
//! left mean (1 × d_t), right mean (1 × d_v), left directions (d_t × k) and
//! right directions (d_v × k). All integers are little-endian.

use std::io::{Cursor, Read};
use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::CcaModel;
use crate::error::{validation, Error, Result};
use crate::repstore::{read_block, write_block, BlockError};

pub const MAGIC: &[u8; 4] = b"CCAM";
const VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    dim_left: usize,
    dim_right: usize,
    k: usize,
    epsilon: f64,
    correlations: Vec<f64>,
}

pub(super) fn to_bytes(model: &CcaModel) -> Result<Vec<u8>> {
    let header = serde_json::to_vec(&Header {
        dim_left: model.dim_left(),
        dim_right: model.dim_right(),
        k: model.k(),
        epsilon: model.epsilon,
        correlations: model.correlations.clone(),
    })
    .expect("header always serializes");

    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(header.len() as u32).to_le_bytes());
    out.extend_from_slice(&header);
    let mean_a = model.mean_a.view().insert_axis(ndarray::Axis(0));
    let mean_b = model.mean_b.view().insert_axis(ndarray::Axis(0));
    for block in [mean_a, mean_b, model.dirs_a.view(), model.dirs_b.view()] {
        write_block(&mut out, block).map_err(|e| match e {
            BlockError::Invalid(m) => validation!("cannot serialize CCA model: {m}"),
            BlockError::Io(e) => validation!("cannot serialize CCA model: {e}"),
        })?;
    }
    Ok(out)
}

pub fn save_model(model: &CcaModel, path: &Path) -> Result<()> {
    let bytes = model.to_bytes()?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<CcaModel> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    from_bytes(&bytes, path)
}

fn from_bytes(bytes: &[u8], path: &Path) -> Result<CcaModel> {
    let mut cursor = Cursor::new(bytes);
    let mut prefix = [0u8; 12];
    cursor
        .read_exact(&mut prefix)
        .map_err(|_| Error::format(path, "file too short for a CCA model"))?;
    if &prefix[..4] != MAGIC {
        return Err(Error::format(path, "bad magic, expected \"CCAM\""));
    }
    let version = u32::from_le_bytes(prefix[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(Error::format(
            path,
            format!("unsupported model version {version}"),
        ));
    }
    let header_len = u32::from_le_bytes(prefix[8..12].try_into().unwrap()) as usize;
    let mut header = vec![0u8; header_len];
    cursor
        .read_exact(&mut header)
        .map_err(|_| Error::format(path, "truncated model header"))?;
    let header: Header = serde_json::from_slice(&header)
        .map_err(|e| Error::format(path, format!("bad model header: {e}")))?;

    let mut next = || read_block(&mut cursor).map_err(|e| e.at(path));
    let mean_a = next()?;
    let mean_b = next()?;
    let dirs_a = next()?;
    let dirs_b = next()?;
    if (cursor.position() as usize) != bytes.len() {
        return Err(Error::format(path, "trailing bytes after the model blocks"));
    }
    let expected = [
        (mean_a.dim(), (1, header.dim_left)),
        (mean_b.dim(), (1, header.dim_right)),
        (dirs_a.dim(), (header.dim_left, header.k)),
        (dirs_b.dim(), (header.dim_right, header.k)),
    ];
    if let Some((got, want)) = expected.iter().find(|(got, want)| got != want) {
        return Err(Error::format(
            path,
            format!("block shape {got:?} does not match header shape {want:?}"),
        ));
    }
    let row = |m: Array2<f64>| -> Array1<f64> {
        let len = m.len();
        m.into_shape_with_order(len).expect("single-row block")
    };
    CcaModel::from_parts(
        row(mean_a),
        row(mean_b),
        dirs_a,
        dirs_b,
        header.correlations,
        header.epsilon,
    )
    .map_err(|e| Error::format(path, e.to_string()))
}
