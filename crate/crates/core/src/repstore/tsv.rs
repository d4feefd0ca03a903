use std::fmt::Write as _;
use std::path::Path;

use ndarray::Array2;

use super::RepresentationSet;
use crate::error::{validation, Error, Result};

pub(super) fn load(path: &Path) -> Result<(Vec<String>, Array2<f64>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut ids = Vec::new();
    let mut values = Vec::new();
    let mut dim = None;
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let id = fields.next().unwrap_or_default();
        let start = values.len();
        for field in fields {
            let v: f64 = field.trim().parse().map_err(|_| {
                Error::format(
                    path,
                    format!("line {}: cannot parse {field:?} as a number", lineno + 1),
                )
            })?;
            values.push(v);
        }
        let row_dim = values.len() - start;
        match dim {
            None => dim = Some(row_dim),
            Some(d) if d != row_dim => {
                return Err(Error::format(
                    path,
                    format!("line {}: expected {d} values, found {row_dim}", lineno + 1),
                ))
            }
            Some(_) => {}
        }
        ids.push(id.to_owned());
    }
    let dim = dim.unwrap_or(0);
    let vectors = Array2::from_shape_vec((ids.len(), dim), values).expect("rows checked above");
    Ok((ids, vectors))
}

pub(super) fn save(set: &RepresentationSet, path: &Path) -> Result<()> {
    let mut out = String::new();
    for (id, row) in set.ids().iter().zip(set.vectors().rows()) {
        if id.contains(['\t', '\n', '\r']) {
            return Err(validation!("id {id:?} cannot be written to TSV"));
        }
        out.push_str(id);
        for v in row {
            // Display for f64 prints the shortest string that parses back exactly.
            write!(out, "\t{v}").unwrap();
        }
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use ndarray::array;

    use super::super::{load_representation_set, save_representation_set, RepFormat};
    use super::*;

    #[test]
    fn parses_identity_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("eye.tsv");
        std::fs::write(&path, "a\t1.0\t0.0\nb\t0.0\t1.0").unwrap();
        let set = load_representation_set(&path, RepFormat::Tsv).unwrap();
        assert_eq!(set.ids(), ["a", "b"]);
        assert_eq!(set.vectors(), array![[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(set.name(), "eye");
    }

    #[test]
    fn ragged_rows_are_format_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.tsv");
        std::fs::write(&path, "a\t1\t2\t3\nb\t1\t2\n").unwrap();
        let err = load_representation_set(&path, RepFormat::Tsv).unwrap_err();
        assert!(matches!(err, Error::Format { .. }), "{err}");
    }

    #[test]
    fn bad_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.tsv");
        std::fs::write(&path, "a\t1\tx\n").unwrap();
        assert!(matches!(
            load_representation_set(&path, RepFormat::Tsv),
            Err(Error::Format { .. })
        ));
    }

    #[test]
    fn nan_is_validation_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.tsv");
        std::fs::write(&path, "a\t1\tNaN\n").unwrap();
        assert!(matches!(
            load_representation_set(&path, RepFormat::Tsv),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn empty_file_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.tsv");
        std::fs::write(&path, "\n").unwrap();
        assert!(load_representation_set(&path, RepFormat::Tsv).is_err());
    }

    #[test]
    fn ids_with_tabs_cannot_be_saved() {
        let dir = tempfile::tempdir().unwrap();
        let set = RepresentationSet::new("s", vec!["a\tb".into()], array![[1.0]]).unwrap();
        assert!(save_representation_set(&set, &dir.path().join("s.tsv"), RepFormat::Tsv).is_err());
    }

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.tsv");
        let set = RepresentationSet::new(
            "s",
            vec!["p".into(), "q".into()],
            array![
                [0.1 + 0.2, -1e-300, 123456789.12345679],
                [std::f64::consts::PI, 0.0, -0.0]
            ],
        )
        .unwrap();
        save_representation_set(&set, &path, RepFormat::Tsv).unwrap();
        assert_eq!(load_representation_set(&path, RepFormat::Tsv).unwrap(), set);
    }
}
