//! Scalar correlation and distance primitives.
//!
//! Every accumulation runs left to right over the input, so results are
//! bit-reproducible regardless of how callers parallelize around them.

use ndarray::ArrayView1;

use crate::error::{degenerate, validation, Result};

/// `1 − (t·v) / (‖t‖‖v‖)`, in `[0, 2]`.
pub fn cosine_distance(t: ArrayView1<'_, f64>, v: ArrayView1<'_, f64>) -> Result<f64> {
    if t.len() != v.len() {
        return Err(validation!(
            "cosine distance between vectors of dimension {} and {}",
            t.len(),
            v.len()
        ));
    }
    let (mut dot, mut tt, mut vv) = (0.0, 0.0, 0.0);
    for (&a, &b) in t.iter().zip(v.iter()) {
        dot += a * b;
        tt += a * a;
        vv += b * b;
    }
    if tt == 0.0 || vv == 0.0 {
        return Err(degenerate!("cosine distance of a zero-norm vector"));
    }
    Ok((1.0 - dot / (tt.sqrt() * vv.sqrt())).clamp(0.0, 2.0))
}

/// Ranks starting at 1; tied values share the average of the ranks they span.
#[derive(Debug, Clone, PartialEq)]
pub struct RankVector(Vec<f64>);

impl RankVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

pub fn rank(x: &[f64]) -> Result<RankVector> {
    if x.is_empty() {
        return Err(validation!("cannot rank an empty sequence"));
    }
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(validation!("non-finite value {} at position {i}", x[i]));
    }
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));

    let mut ranks = vec![0.0; x.len()];
    let mut start = 0;
    while start < order.len() {
        let value = x[order[start]];
        let mut end = start + 1;
        // -0.0 and 0.0 compare equal here even though total_cmp orders them
        while end < order.len() && x[order[end]] == value {
            end += 1;
        }
        // positions start..end hold ranks start+1 ..= end
        let shared = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = shared;
        }
        start = end;
    }
    Ok(RankVector(ranks))
}

/// Product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(degenerate!(
            "pearson correlation of a zero-variance sequence"
        ));
    }
    let product = sxx * syy;
    let denom = if product.is_normal() {
        product.sqrt()
    } else {
        sxx.sqrt() * syy.sqrt()
    };
    Ok((sxy / denom).clamp(-1.0, 1.0))
}

/// Pearson correlation of the average-rank vectors.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let rx = rank(x)?;
    let ry = rank(y)?;
    if is_constant(x) || is_constant(y) {
        return Err(degenerate!("spearman correlation of a constant sequence"));
    }
    pearson(rx.as_slice(), ry.as_slice())
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(validation!(
            "sequences differ in length: {} vs {}",
            x.len(),
            y.len()
        ));
    }
    if x.len() < 2 {
        return Err(validation!(
            "correlation needs at least 2 observations, got {}",
            x.len()
        ));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(validation!("correlation input contains non-finite values"));
    }
    Ok(())
}

fn is_constant(x: &[f64]) -> bool {
    x.iter().all(|&v| v == x[0])
}
