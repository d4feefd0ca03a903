use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use ndarray::{Array2, ArrayView2};

use super::RepresentationSet;
use crate::error::{validation, Error, Result};

pub const MAGIC: &[u8; 4] = b"REPS";
pub const VERSION: u32 = 1;
const HEADER_LEN: u64 = 16;

/// Sidecar holding the JSON id list of a binary representation file.
pub fn manifest_path(path: &Path) -> PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".ids.json");
    PathBuf::from(os)
}

/// Writes one `REPS` block. Values outside the `f32` range are rejected.
pub(crate) fn write_block<W: Write>(
    out: &mut W,
    matrix: ArrayView2<'_, f64>,
) -> Result<(), BlockError> {
    let (n, d) = matrix.dim();
    let n32 = u32::try_from(n).map_err(|_| BlockError::Invalid(format!("{n} rows exceed u32")))?;
    let d32 =
        u32::try_from(d).map_err(|_| BlockError::Invalid(format!("{d} columns exceed u32")))?;
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&n32.to_le_bytes())?;
    out.write_all(&d32.to_le_bytes())?;
    for &v in matrix.iter() {
        let single = v as f32;
        if !single.is_finite() {
            return Err(BlockError::Invalid(format!(
                "value {v} is not representable as f32"
            )));
        }
        out.write_all(&single.to_le_bytes())?;
    }
    Ok(())
}

/// Reads one `REPS` block.
pub(crate) fn read_block<R: Read>(input: &mut R) -> Result<Array2<f64>, BlockError> {
    let mut header = [0u8; HEADER_LEN as usize];
    input.read_exact(&mut header)?;
    if &header[..4] != MAGIC {
        return Err(BlockError::Invalid(format!(
            "bad magic {:?}, expected \"REPS\"",
            String::from_utf8_lossy(&header[..4])
        )));
    }
    let word = |i: usize| u32::from_le_bytes(header[i..i + 4].try_into().unwrap());
    let version = word(4);
    if version != VERSION {
        return Err(BlockError::Invalid(format!(
            "unsupported version {version}"
        )));
    }
    let (n, d) = (word(8) as usize, word(12) as usize);
    let len = n
        .checked_mul(d)
        .and_then(|c| c.checked_mul(4))
        .ok_or_else(|| BlockError::Invalid(format!("header n={n}, d={d} overflows")))?;
    let mut bytes = vec![0u8; len];
    input.read_exact(&mut bytes).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => BlockError::Invalid(format!(
            "data shorter than the n={n} × d={d} values declared in the header"
        )),
        _ => BlockError::Io(e),
    })?;
    let values = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
        .collect();
    Ok(Array2::from_shape_vec((n, d), values).expect("length checked above"))
}

#[derive(Debug)]
pub(crate) enum BlockError {
    Io(std::io::Error),
    Invalid(String),
}

impl From<std::io::Error> for BlockError {
    fn from(e: std::io::Error) -> Self {
        BlockError::Io(e)
    }
}

impl BlockError {
    pub(crate) fn at(self, path: &Path) -> Error {
        match self {
            BlockError::Io(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => {
                Error::format(path, "unexpected end of file")
            }
            BlockError::Io(e) => Error::io(path, e),
            BlockError::Invalid(message) => Error::format(path, message),
        }
    }
}

pub(super) fn load(path: &Path) -> Result<(Vec<String>, Array2<f64>)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let file_len = file.metadata().map_err(|e| Error::io(path, e))?.len();
    let mut reader = BufReader::new(file);
    let vectors = read_block(&mut reader).map_err(|e| e.at(path))?;
    let expected = HEADER_LEN + 4 * vectors.len() as u64;
    if file_len != expected {
        return Err(Error::format(
            path,
            format!(
                "file is {file_len} bytes but the header (n={}, d={}) implies {expected}",
                vectors.nrows(),
                vectors.ncols()
            ),
        ));
    }

    let manifest = manifest_path(path);
    let text = std::fs::read_to_string(&manifest).map_err(|e| Error::io(&manifest, e))?;
    let ids: Vec<String> = serde_json::from_str(&text)
        .map_err(|e| Error::format(&manifest, format!("expected a JSON array of strings: {e}")))?;
    if ids.len() != vectors.nrows() {
        return Err(Error::format(
            &manifest,
            format!("{} ids for {} rows", ids.len(), vectors.nrows()),
        ));
    }
    Ok((ids, vectors))
}

pub(super) fn save(set: &RepresentationSet, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_block(&mut out, set.vectors()).map_err(|e| match e {
        BlockError::Invalid(message) => validation!("cannot write {}: {message}", path.display()),
        BlockError::Io(e) => Error::io(path, e),
    })?;
    out.flush().map_err(|e| Error::io(path, e))?;

    let manifest = manifest_path(path);
    let json = serde_json::to_string(set.ids()).expect("string list always serializes");
    std::fs::write(&manifest, json).map_err(|e| Error::io(&manifest, e))
}
