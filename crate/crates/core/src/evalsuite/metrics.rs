use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::corrstats::pearson;
use crate::error::{validation, Error, Result};

/// Pairs correlated when the caller names none: BLEU against image
/// retrieval, STS and training-set size.
pub const DEFAULT_METRIC_PAIRS: [(&str, &str); 3] =
    [("bleu", "img_r10"), ("bleu", "sts"), ("bleu", "train_size")];

const MISSING: [&str; 6] = ["", "-", "---", "na", "n/a", "nan"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsRow {
    pub model: String,
    pub arch: Option<String>,
    pub values: BTreeMap<String, Option<f64>>,
}

/// Per-model task metrics. Any metric may be absent for a given model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsTable {
    columns: Vec<String>,
    rows: Vec<MetricsRow>,
}

impl MetricsTable {
    /// Parses a TSV whose header names the columns. A `model` column is
    /// required, `arch` (or `architecture`) is optional, every other column
    /// holds numbers. Empty cells, `-`, `---` and `NA` mark absent values.
    pub fn parse_tsv(text: &str, origin: &Path) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::format(origin, "empty metrics table"))?;
        let header: Vec<String> = header.split('\t').map(|h| h.trim().to_owned()).collect();
        let model_col = header
            .iter()
            .position(|h| h == "model")
            .ok_or_else(|| Error::format(origin, "header has no \"model\" column"))?;
        let arch_col = header
            .iter()
            .position(|h| h == "arch" || h == "architecture");
        let numeric: Vec<(usize, String)> = header
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != model_col && Some(*i) != arch_col)
            .map(|(i, h)| (i, h.clone()))
            .collect();

        let mut rows = Vec::new();
        for (lineno, line) in lines {
            let cells: Vec<&str> = line.split('\t').map(str::trim).collect();
            if cells.len() != header.len() {
                return Err(Error::format(
                    origin,
                    format!(
                        "line {}: {} cells for {} columns",
                        lineno + 1,
                        cells.len(),
                        header.len()
                    ),
                ));
            }
            let mut values = BTreeMap::new();
            for (i, name) in &numeric {
                let cell = cells[*i];
                let value = if MISSING.contains(&cell.to_ascii_lowercase().as_str()) {
                    None
                } else {
                    let v: f64 = cell.parse().map_err(|_| {
                        Error::format(
                            origin,
                            format!("line {}: {name} = {cell:?} is not a number", lineno + 1),
                        )
                    })?;
                    Some(v)
                };
                values.insert(name.clone(), value);
            }
            rows.push(MetricsRow {
                model: cells[model_col].to_owned(),
                arch: arch_col
                    .map(|i| cells[i].to_owned())
                    .filter(|a| !a.is_empty()),
                values,
            });
        }
        Self::new(numeric.into_iter().map(|(_, n)| n).collect(), rows)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_tsv(&text, path)
    }

    pub fn new(columns: Vec<String>, rows: Vec<MetricsRow>) -> Result<Self> {
        for row in &rows {
            if let Some((name, v)) = row
                .values
                .iter()
                .find(|(_, v)| v.is_some_and(|v| !v.is_finite()))
            {
                return Err(validation!("{}: {name} = {v:?} is not finite", row.model));
            }
            if let Some(name) = row.values.keys().find(|k| !columns.contains(k)) {
                return Err(validation!("{}: unknown column {name:?}", row.model));
            }
        }
        Ok(Self { columns, rows })
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[MetricsRow] {
        &self.rows
    }
}

/// `"x~y"`, the key a column pair is reported under.
pub fn pair_key(x: &str, y: &str) -> String {
    format!("{x}~{y}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupCorrelation {
    pub n: usize,
    pub pearson: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterPoint {
    pub x: f64,
    pub y: f64,
    pub label: String,
    pub pair: String,
    pub group: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricCorrelationReport {
    /// Pair key → group → correlation. Group `"all"` covers every complete
    /// row; other groups are architecture tags.
    pub correlations: BTreeMap<String, BTreeMap<String, GroupCorrelation>>,
    pub scatter: Vec<ScatterPoint>,
}

impl MetricCorrelationReport {
    /// Columns `x`, `y`, `label`, `pair`, `group`.
    pub fn scatter_tsv(&self) -> String {
        let mut out = String::from("x\ty\tlabel\tpair\tgroup\n");
        for p in &self.scatter {
            writeln!(
                out,
                "{:?}\t{:?}\t{}\t{}\t{}",
                p.x,
                p.y,
                p.label,
                p.pair,
                p.group.as_deref().unwrap_or("")
            )
            .unwrap();
        }
        out
    }
}

/// Pearson correlation for each requested column pair, overall and per
/// architecture, over rows where both values are present.
pub fn metric_correlation_report(
    table: &MetricsTable,
    pairs: &[(String, String)],
) -> Result<MetricCorrelationReport> {
    if pairs.is_empty() {
        return Err(validation!("no metric pairs requested"));
    }
    let mut correlations = BTreeMap::new();
    let mut scatter = Vec::new();
    for (x, y) in pairs {
        for column in [x, y] {
            if !table.columns.contains(column) {
                return Err(validation!("unknown metric column {column:?}"));
            }
        }
        let key = pair_key(x, y);
        let complete: Vec<(&MetricsRow, f64, f64)> = table
            .rows
            .iter()
            .filter_map(|row| Some((row, row.values[x]?, row.values[y]?)))
            .collect();
        if complete.len() < 2 {
            return Err(validation!(
                "pair {key} has {} complete rows, at least 2 are needed",
                complete.len()
            ));
        }

        let mut groups: BTreeMap<String, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
        for &(row, vx, vy) in &complete {
            let all = groups.entry("all".to_owned()).or_default();
            all.0.push(vx);
            all.1.push(vy);
            if let Some(arch) = &row.arch {
                let group = groups.entry(arch.clone()).or_default();
                group.0.push(vx);
                group.1.push(vy);
            }
            scatter.push(ScatterPoint {
                x: vx,
                y: vy,
                label: row.model.clone(),
                pair: key.clone(),
                group: row.arch.clone(),
            });
        }

        let mut per_group = BTreeMap::new();
        for (name, (xs, ys)) in groups {
            match pearson(&xs, &ys) {
                Ok(r) => {
                    per_group.insert(
                        name,
                        GroupCorrelation {
                            n: xs.len(),
                            pearson: r,
                        },
                    );
                }
                Err(e) if name == "all" => {
                    return Err(match e {
                        Error::DegenerateInput(m) => {
                            Error::DegenerateInput(format!("{m} for pair {key}"))
                        }
                        other => other,
                    })
                }
                // architecture groups with fewer than 2 rows or no variance are left out
                Err(_) => {}
            }
        }
        correlations.insert(key, per_group);
    }
    Ok(MetricCorrelationReport {
        correlations,
        scatter,
    })
}
