//! Distance covariance and distance correlation between paired samples of
//! arbitrary dimension.
//!
//! Both sample estimators work on centered Euclidean distance matrices:
//!
//! * [`Estimator::Biased`]: the original V-statistic. Distances are double
//!   centered (`A_ij = D_ij − D̄_i· − D̄_·j + D̄`) and `dcov² = mean(A∘B)`.
//! * [`Estimator::BiasCorrected`]: the U-centered estimator, unbiased for
//!   the population `dcov²`. Needs `n ≥ 4`. The V-statistic is inflated
//!   towards positive values when dimensions are large relative to `n`,
//!   so independent high-dimensional samples can show `dcorr` well above
//!   zero under it.
//!
//! `dcorr = dcov(X, Y) / sqrt(dcov(X, X) · dcov(Y, Y))`, clipped to `[0, 1]`.
//!
//! Matrices are built and reduced in parallel over rows; each row is summed
//! sequentially and row totals are added in row order, so results do not
//! depend on the number of threads.

use ndarray::parallel::prelude::*;
use ndarray::{Array2, ArrayView2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{degenerate, validation, Error, Result};
use crate::repstore::RepresentationSet;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    Biased,
    #[default]
    BiasCorrected,
}

impl Estimator {
    fn min_samples(self) -> usize {
        match self {
            Estimator::Biased => 2,
            Estimator::BiasCorrected => 4,
        }
    }
}

/// Centered distance matrix of one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredDistanceMatrix {
    values: Array2<f64>,
    estimator: Estimator,
}

impl CenteredDistanceMatrix {
    pub fn values(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    pub fn estimator(&self) -> Estimator {
        self.estimator
    }

    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Estimate of `dcov²` between the two underlying samples. May be
    /// slightly negative from rounding, and genuinely negative under the
    /// bias-corrected estimator.
    pub fn product(&self, other: &CenteredDistanceMatrix) -> Result<f64> {
        if self.estimator != other.estimator {
            return Err(validation!("centered matrices use different estimators"));
        }
        if self.len() != other.len() {
            return Err(validation!(
                "centered matrices differ in size: {} vs {}",
                self.len(),
                other.len()
            ));
        }
        let n = self.len() as f64;
        let row_sums: Vec<f64> = self
            .values
            .axis_iter(Axis(0))
            .into_par_iter()
            .zip(other.values.axis_iter(Axis(0)))
            .map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| x * y).sum::<f64>())
            .collect();
        let total: f64 = row_sums.iter().sum();
        Ok(match self.estimator {
            Estimator::Biased => total / (n * n),
            Estimator::BiasCorrected => total / (n * (n - 3.0)),
        })
    }
}

/// Pairwise Euclidean distances between rows.
pub fn distance_matrix(x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    let n = x.nrows();
    if n < 2 {
        return Err(validation!(
            "distance matrix needs at least 2 rows, got {n}"
        ));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(validation!(
            "distance matrix input contains non-finite values"
        ));
    }
    let mut d = Array2::<f64>::zeros((n, n));
    d.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut row)| {
            let xi = x.row(i);
            for (j, out) in row.iter_mut().enumerate() {
                let xj = x.row(j);
                *out = xi
                    .iter()
                    .zip(xj.iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
            }
        });
    Ok(d)
}

fn check_distances(d: &Array2<f64>) -> Result<()> {
    let (n, m) = d.dim();
    if n != m {
        return Err(validation!("distance matrix must be square, got {n}×{m}"));
    }
    let scale = d.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let tol = 1e-12 * scale;
    for i in 0..n {
        if d[[i, i]] != 0.0 {
            return Err(validation!("distance matrix has non-zero diagonal at {i}"));
        }
        for j in 0..i {
            if (d[[i, j]] - d[[j, i]]).abs() > tol {
                return Err(validation!(
                    "distance matrix is not symmetric at ({i}, {j})"
                ));
            }
        }
    }
    Ok(())
}

fn row_sums(d: &Array2<f64>) -> Vec<f64> {
    d.axis_iter(Axis(0))
        .into_par_iter()
        .map(|row| row.iter().sum::<f64>())
        .collect()
}

/// `A_ij = D_ij − rowmean_i − colmean_j + grandmean`. Column means equal row
/// means for a symmetric `D`.
pub fn double_center(d: &Array2<f64>) -> Result<CenteredDistanceMatrix> {
    check_distances(d)?;
    let n = d.nrows() as f64;
    let means: Vec<f64> = row_sums(d).into_iter().map(|s| s / n).collect();
    let grand = means.iter().sum::<f64>() / n;
    let mut values = d.clone();
    values
        .axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut row)| {
            for (j, v) in row.iter_mut().enumerate() {
                *v = *v - means[i] - means[j] + grand;
            }
        });
    Ok(CenteredDistanceMatrix {
        values,
        estimator: Estimator::Biased,
    })
}

/// U-centering: `Ã_ij = D_ij − R_i/(n−2) − R_j/(n−2) + T/((n−1)(n−2))` off
/// the diagonal and zero on it, with row sums `R` and total `T`.
pub fn u_center(d: &Array2<f64>) -> Result<CenteredDistanceMatrix> {
    check_distances(d)?;
    let n = d.nrows();
    if n < 4 {
        return Err(validation!(
            "bias-corrected centering needs at least 4 samples, got {n}"
        ));
    }
    let sums = row_sums(d);
    let total: f64 = sums.iter().sum();
    let nf = n as f64;
    let grand = total / ((nf - 1.0) * (nf - 2.0));
    let mut values = d.clone();
    values
        .axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut row)| {
            for (j, v) in row.iter_mut().enumerate() {
                *v = if i == j {
                    0.0
                } else {
                    *v - sums[i] / (nf - 2.0) - sums[j] / (nf - 2.0) + grand
                };
            }
        });
    Ok(CenteredDistanceMatrix {
        values,
        estimator: Estimator::BiasCorrected,
    })
}

pub fn center(d: &Array2<f64>, estimator: Estimator) -> Result<CenteredDistanceMatrix> {
    match estimator {
        Estimator::Biased => double_center(d),
        Estimator::BiasCorrected => u_center(d),
    }
}

/// Distance matrix of `x`, centered for `estimator`.
pub fn centered_distances(
    x: ArrayView2<'_, f64>,
    estimator: Estimator,
) -> Result<CenteredDistanceMatrix> {
    if x.nrows() < estimator.min_samples() {
        return Err(validation!(
            "{estimator:?} estimator needs at least {} samples, got {}",
            estimator.min_samples(),
            x.nrows()
        ));
    }
    center(&distance_matrix(x)?, estimator)
}

fn check_rows(x: ArrayView2<'_, f64>, y: ArrayView2<'_, f64>) -> Result<()> {
    if x.nrows() != y.nrows() {
        return Err(validation!(
            "samples differ in size: {} vs {} rows",
            x.nrows(),
            y.nrows()
        ));
    }
    Ok(())
}

/// Sample distance covariance, `sqrt(max(dcov², 0))`.
pub fn dcov(x: ArrayView2<'_, f64>, y: ArrayView2<'_, f64>, estimator: Estimator) -> Result<f64> {
    check_rows(x, y)?;
    let a = centered_distances(x, estimator)?;
    let b = centered_distances(y, estimator)?;
    Ok(a.product(&b)?.max(0.0).sqrt())
}

pub fn dcorr(x: ArrayView2<'_, f64>, y: ArrayView2<'_, f64>, estimator: Estimator) -> Result<f64> {
    check_rows(x, y)?;
    let a = centered_distances(x, estimator)?;
    let b = centered_distances(y, estimator)?;
    dcorr_centered(&a, &b)
}

/// Distance correlation from precomputed centered matrices.
pub fn dcorr_centered(a: &CenteredDistanceMatrix, b: &CenteredDistanceMatrix) -> Result<f64> {
    let vxy = a.product(b)?;
    let vxx = a.product(a)?;
    let vyy = b.product(b)?;
    if vxx <= 0.0 || vyy <= 0.0 {
        return Err(degenerate!(
            "distance variance is not positive (constant sample?): {vxx:e}, {vyy:e}"
        ));
    }
    let product = vxx * vyy;
    let denom = if product.is_normal() {
        product.sqrt()
    } else {
        vxx.sqrt() * vyy.sqrt()
    };
    let r2 = vxy / denom;
    Ok(r2.max(0.0).sqrt().min(1.0))
}

/// Row-subsampling record attached to a [`DcorrMatrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subsample {
    pub size: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DcorrOptions {
    pub estimator: Estimator,
    /// Largest sample size processed without subsampling.
    pub max_n: usize,
    /// Subsample this many rows (seeded) when a set is larger.
    pub subsample: Option<Subsample>,
}

impl Default for DcorrOptions {
    fn default() -> Self {
        Self {
            estimator: Estimator::default(),
            max_n: 20_000,
            subsample: None,
        }
    }
}

/// Pairwise distance correlations between representation sets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DcorrMatrix {
    pub labels: Vec<String>,
    #[serde(serialize_with = "rows")]
    pub values: Array2<f64>,
    pub n: usize,
    pub estimator: Estimator,
    pub subsample: Option<Subsample>,
}

fn rows<S: Serializer>(m: &Array2<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(m.rows().into_iter().map(|r| r.to_vec()))
}

impl DcorrMatrix {
    /// Header row of labels followed by one row of values per label.
    pub fn to_tsv(&self) -> String {
        let mut out = self.labels.join("\t");
        out.push('\n');
        for row in self.values.rows() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }
}

/// `dcorr` for every pair of sets. All sets must list the same ids in the
/// same order. Each set's centered matrix is computed once.
pub fn dcorr_matrix(sets: &[RepresentationSet], options: &DcorrOptions) -> Result<DcorrMatrix> {
    let first = sets
        .first()
        .ok_or_else(|| validation!("dcorr matrix needs at least one set"))?;
    for set in &sets[1..] {
        if set.ids() != first.ids() {
            return Err(Error::Alignment(format!(
                "set {:?} does not share the id order of set {:?}",
                set.name(),
                first.name()
            )));
        }
    }
    let n = first.len();
    let rows = match options.subsample {
        Some(sub) if sub.size < n => {
            let mut rng = ChaCha20Rng::seed_from_u64(sub.seed);
            let mut rows = rand::seq::index::sample(&mut rng, n, sub.size).into_vec();
            rows.sort_unstable();
            Some(rows)
        }
        _ => None,
    };
    let used = rows.as_ref().map_or(n, Vec::len);
    if used > options.max_n {
        return Err(validation!(
            "{used} samples exceed the cap of {}; subsample or raise the cap",
            options.max_n
        ));
    }

    let centered = sets
        .iter()
        .map(|set| {
            let x = match &rows {
                Some(rows) => set.vectors().select(Axis(0), rows),
                None => set.vectors().to_owned(),
            };
            centered_distances(x.view(), options.estimator)
        })
        .collect::<Result<Vec<_>>>()?;

    let m = sets.len();
    let mut values = Array2::<f64>::eye(m);
    for i in 0..m {
        for j in (i + 1)..m {
            let r = dcorr_centered(&centered[i], &centered[j]).map_err(|e| match e {
                Error::DegenerateInput(msg) => Error::DegenerateInput(format!(
                    "{msg} in pair ({:?}, {:?})",
                    sets[i].name(),
                    sets[j].name()
                )),
                other => other,
            })?;
            values[[i, j]] = r;
            values[[j, i]] = r;
        }
    }
    if m == 1 {
        // a single set still has to be non-constant
        if centered[0].product(&centered[0])? <= 0.0 {
            return Err(degenerate!("set {:?} is constant", first.name()));
        }
    }
    Ok(DcorrMatrix {
        labels: sets.iter().map(|s| s.name().to_owned()).collect(),
        values,
        n: used,
        estimator: options.estimator,
        subsample: rows.map(|_| options.subsample.expect("rows come from a subsample")),
    })
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use ndarray::{array, Array2};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    use super::*;

    fn column(values: &[f64]) -> Array2<f64> {
        Array2::from_shape_vec((values.len(), 1), values.to_vec()).unwrap()
    }

    fn gaussian(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_simple_fn((rows, cols), || StandardNormal.sample(&mut rng))
    }

    // Plain triple loops over raw distances, no centered matrices involved.
    fn distances(x: &Array2<f64>) -> Vec<Vec<f64>> {
        let n = x.nrows();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (&x.row(i) - &x.row(j)).mapv(|v| v * v).sum().sqrt())
                    .collect()
            })
            .collect()
    }

    /// Biased dcov² as S1 + S2 − 2·S3.
    fn oracle_biased(x: &Array2<f64>, y: &Array2<f64>) -> f64 {
        let (a, b) = (distances(x), distances(y));
        let n = a.len() as f64;
        let mut s1 = 0.0;
        let (mut sa, mut sb, mut s3) = (0.0, 0.0, 0.0);
        for i in 0..a.len() {
            let (ra, rb): (f64, f64) = (a[i].iter().sum(), b[i].iter().sum());
            s3 += ra * rb;
            sa += ra;
            sb += rb;
            for j in 0..a.len() {
                s1 += a[i][j] * b[i][j];
            }
        }
        s1 / (n * n) + (sa / (n * n)) * (sb / (n * n)) - 2.0 * s3 / (n * n * n)
    }

    /// Unbiased dcov² as the U-statistic Ω_n.
    fn oracle_unbiased(x: &Array2<f64>, y: &Array2<f64>) -> f64 {
        let (a, b) = (distances(x), distances(y));
        let n = a.len() as f64;
        let mut s1 = 0.0;
        let (mut sa, mut sb, mut s3) = (0.0, 0.0, 0.0);
        for i in 0..a.len() {
            let (ra, rb): (f64, f64) = (a[i].iter().sum(), b[i].iter().sum());
            s3 += ra * rb;
            sa += ra;
            sb += rb;
            for j in 0..a.len() {
                s1 += a[i][j] * b[i][j];
            }
        }
        s1 / (n * (n - 3.0)) + sa * sb / (n * (n - 1.0) * (n - 2.0) * (n - 3.0))
            - 2.0 * s3 / (n * (n - 2.0) * (n - 3.0))
    }

    fn oracle_dcorr(
        x: &Array2<f64>,
        y: &Array2<f64>,
        f: fn(&Array2<f64>, &Array2<f64>) -> f64,
    ) -> f64 {
        let r2 = f(x, y) / (f(x, x) * f(y, y)).sqrt();
        r2.max(0.0).sqrt()
    }

    #[test]
    fn distance_matrix_examples() {
        assert_eq!(
            distance_matrix(column(&[0.0, 3.0]).view()).unwrap(),
            array![[0.0, 3.0], [3.0, 0.0]]
        );
        let d = distance_matrix(array![[0.0, 0.0], [3.0, 4.0]].view()).unwrap();
        assert_eq!(d[[0, 1]], 5.0);
        assert_eq!(d[[1, 0]], 5.0);
        let d = distance_matrix(array![[1.0, 2.0], [1.0, 2.0], [1.0, 2.0]].view()).unwrap();
        assert!(d.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn distance_matrix_is_exactly_symmetric() {
        let d = distance_matrix(gaussian(40, 7, 1).view()).unwrap();
        assert_eq!(d, d.t());
    }

    #[test]
    fn double_center_examples() {
        let zeros = Array2::<f64>::zeros((3, 3));
        assert_eq!(double_center(&zeros).unwrap().values(), zeros);
        let centered = double_center(&array![[0.0, 3.0], [3.0, 0.0]]).unwrap();
        assert_eq!(centered.values(), array![[-1.5, 1.5], [1.5, -1.5]]);
    }

    #[test]
    fn centered_rows_and_columns_vanish() {
        let d = distance_matrix(gaussian(60, 4, 2).view()).unwrap();
        let n = d.nrows() as f64;
        let scale = d.iter().cloned().fold(0.0, f64::max);
        for centered in [double_center(&d).unwrap(), u_center(&d).unwrap()] {
            for s in centered
                .values()
                .sum_axis(Axis(0))
                .iter()
                .chain(centered.values().sum_axis(Axis(1)).iter())
            {
                assert!(s.abs() < 1e-9 * n * scale, "sum {s}");
            }
        }
    }

    #[test]
    fn asymmetric_distances_rejected() {
        let d = array![[0.0, 1.0], [2.0, 0.0]];
        assert!(matches!(double_center(&d), Err(Error::Validation(_))));
        let d = array![[1.0, 1.0], [1.0, 0.0]];
        assert!(matches!(double_center(&d), Err(Error::Validation(_))));
    }

    #[test]
    fn dcov_of_constant_is_zero() {
        let x = gaussian(10, 2, 3);
        let y = Array2::from_elem((10, 3), 4.0);
        for est in [Estimator::Biased, Estimator::BiasCorrected] {
            assert_eq!(dcov(x.view(), y.view(), est).unwrap(), 0.0);
        }
    }

    #[test]
    fn dcov_n4_matches_oracle() {
        let x = column(&[0.0, 1.0, 2.0, 3.0]);
        // dcov² = 13/16 by exact rational evaluation of S1 + S2 − 2·S3
        let expected = (13.0f64 / 16.0).sqrt();
        assert_abs_diff_eq!(oracle_biased(&x, &x).sqrt(), expected, epsilon = 1e-15);
        assert_abs_diff_eq!(
            dcov(x.view(), x.view(), Estimator::Biased).unwrap(),
            expected,
            epsilon = 1e-12
        );
    }

    #[test]
    fn dcov_squared_scales_linearly() {
        let x = gaussian(30, 3, 4);
        let y = gaussian(30, 2, 5).mapv(|v| v * v) + x.column(0).insert_axis(Axis(1));
        for est in [Estimator::Biased, Estimator::BiasCorrected] {
            let base = dcov(x.view(), y.view(), est).unwrap().powi(2);
            let scaled = dcov((&x * 2.0).view(), y.view(), est).unwrap().powi(2);
            assert_abs_diff_eq!(scaled, 2.0 * base, epsilon = 1e-12);
        }
    }

    #[test]
    fn dcorr_n4_example() {
        let x = column(&[0.0, 1.0, 2.0, 3.0]);
        let y = column(&[1.0, 0.0, 3.0, 2.0]);
        // biased: sqrt((9/16) / (13/16)) = 3/√13
        let biased = dcorr(x.view(), y.view(), Estimator::Biased).unwrap();
        assert_abs_diff_eq!(biased, 3.0 / 13f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(biased, oracle_dcorr(&x, &y, oracle_biased), epsilon = 1e-12);
        // bias-corrected: Ω(X,Y) = Ω(X,X) = Ω(Y,Y) = 2/3
        let corrected = dcorr(x.view(), y.view(), Estimator::BiasCorrected).unwrap();
        assert_abs_diff_eq!(corrected, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            corrected,
            oracle_dcorr(&x, &y, oracle_unbiased),
            epsilon = 1e-12
        );
    }

    #[test]
    fn dcorr_matches_oracles_on_random_data() {
        for seed in 0..5 {
            let x = gaussian(25, 3, 10 + seed);
            let y = x.mapv(f64::sin) + gaussian(25, 3, 20 + seed);
            for (est, oracle) in [
                (
                    Estimator::Biased,
                    oracle_biased as fn(&Array2<f64>, &Array2<f64>) -> f64,
                ),
                (Estimator::BiasCorrected, oracle_unbiased),
            ] {
                let got = dcorr(x.view(), y.view(), est).unwrap();
                assert_abs_diff_eq!(got, oracle_dcorr(&x, &y, oracle), epsilon = 1e-12);
                assert_abs_diff_eq!(
                    dcov(x.view(), y.view(), est).unwrap().powi(2),
                    oracle(&x, &y).max(0.0),
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn dcorr_is_reflexive_and_symmetric() {
        let x = gaussian(50, 4, 6);
        let y = gaussian(50, 2, 7);
        for est in [Estimator::Biased, Estimator::BiasCorrected] {
            assert_abs_diff_eq!(
                dcorr(x.view(), x.view(), est).unwrap(),
                1.0,
                epsilon = 1e-12
            );
            assert_eq!(
                dcorr(x.view(), y.view(), est).unwrap(),
                dcorr(y.view(), x.view(), est).unwrap()
            );
        }
    }

    #[test]
    fn dcorr_errors() {
        let x = gaussian(10, 2, 8);
        let c = Array2::from_elem((10, 2), 1.0);
        assert!(matches!(
            dcorr(x.view(), c.view(), Estimator::Biased),
            Err(Error::DegenerateInput(_))
        ));
        let short = gaussian(9, 2, 9);
        assert!(matches!(
            dcorr(x.view(), short.view(), Estimator::Biased),
            Err(Error::Validation(_))
        ));
        let tiny = gaussian(3, 1, 10);
        assert!(dcorr(tiny.view(), tiny.view(), Estimator::BiasCorrected).is_err());
        assert!(dcorr(tiny.view(), tiny.view(), Estimator::Biased).is_ok());
    }

    fn set(name: &str, x: Array2<f64>) -> RepresentationSet {
        let ids = (0..x.nrows()).map(|i| format!("s{i}")).collect();
        RepresentationSet::new(name, ids, x).unwrap()
    }

    #[test]
    fn matrix_of_one_set() {
        let m = dcorr_matrix(&[set("a", gaussian(10, 2, 11))], &DcorrOptions::default()).unwrap();
        assert_eq!(m.values, array![[1.0]]);
        assert_eq!(m.to_tsv(), "a\n1.0\n");
    }

    #[test]
    fn matrix_is_symmetric_with_unit_diagonal() {
        let sets = [
            set("a", gaussian(30, 3, 12)),
            set("b", gaussian(30, 5, 13)),
            set("c", gaussian(30, 1, 14)),
        ];
        let m = dcorr_matrix(&sets, &DcorrOptions::default()).unwrap();
        for i in 0..3 {
            assert_eq!(m.values[[i, i]], 1.0);
            for j in 0..3 {
                assert!((m.values[[i, j]] - m.values[[j, i]]).abs() < 1e-12);
                assert!((0.0..=1.0).contains(&m.values[[i, j]]));
            }
        }
        let json = serde_json::to_value(&m).unwrap();
        assert_eq!(json["labels"], serde_json::json!(["a", "b", "c"]));
        assert_eq!(json["values"][0][0], 1.0);
    }

    #[test]
    fn matrix_requires_shared_ids() {
        let a = set("a", gaussian(10, 2, 15));
        let b = RepresentationSet::new(
            "b",
            (0..10).rev().map(|i| format!("s{i}")).collect(),
            gaussian(10, 2, 16),
        )
        .unwrap();
        assert!(matches!(
            dcorr_matrix(&[a, b], &DcorrOptions::default()),
            Err(Error::Alignment(_))
        ));
    }

    #[test]
    fn cap_and_subsample() {
        let sets = [set("a", gaussian(50, 2, 17)), set("b", gaussian(50, 2, 18))];
        let capped = DcorrOptions {
            max_n: 40,
            ..DcorrOptions::default()
        };
        assert!(matches!(
            dcorr_matrix(&sets, &capped),
            Err(Error::Validation(_))
        ));
        let sub = DcorrOptions {
            max_n: 40,
            subsample: Some(Subsample { size: 30, seed: 3 }),
            ..DcorrOptions::default()
        };
        let first = dcorr_matrix(&sets, &sub).unwrap();
        let again = dcorr_matrix(&sets, &sub).unwrap();
        assert_eq!(first, again);
        assert_eq!(first.n, 30);
        assert_eq!(first.subsample, Some(Subsample { size: 30, seed: 3 }));
    }
}
