//! Canonical correlation analysis between two paired representation spaces.
//!
//! Fitting centers both sides, adds a ridge of `epsilon · mean(diag)` to each
//! within-set covariance, whitens each side with the symmetric inverse square
//! root of its covariance and takes the SVD of the whitened cross-covariance.
//! The singular values are the canonical correlations; the singular vectors
//! mapped back through the whiteners are the direction pairs.
//!
//! The fit only reads the paired training data. Nothing is learned through
//! the encoders that produced the vectors.

mod io;

use nalgebra::{DMatrix, SymmetricEigen, SVD};
use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{degenerate, validation, Error, Result, Side};
use crate::linalg::{cross_covariance, from_dmatrix, to_dmatrix};
use crate::repstore::PairedDataset;

pub use self::io::{load_model, save_model, MAGIC as MODEL_MAGIC};

pub const DEFAULT_EPSILON: f64 = 1e-4;

/// Fitted CCA: per-side means, direction matrices (one column per
/// component) and the canonical correlations in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct CcaModel {
    mean_a: Array1<f64>,
    mean_b: Array1<f64>,
    dirs_a: Array2<f64>,
    dirs_b: Array2<f64>,
    correlations: Vec<f64>,
    epsilon: f64,
}

impl CcaModel {
    pub fn from_parts(
        mean_a: Array1<f64>,
        mean_b: Array1<f64>,
        dirs_a: Array2<f64>,
        dirs_b: Array2<f64>,
        correlations: Vec<f64>,
        epsilon: f64,
    ) -> Result<Self> {
        let k = correlations.len();
        if dirs_a.dim() != (mean_a.len(), k) || dirs_b.dim() != (mean_b.len(), k) {
            return Err(validation!(
                "inconsistent CCA shapes: means {}/{}, directions {:?}/{:?}, {k} correlations",
                mean_a.len(),
                mean_b.len(),
                dirs_a.dim(),
                dirs_b.dim()
            ));
        }
        if k == 0 || k > mean_a.len().min(mean_b.len()) {
            return Err(validation!("invalid number of components {k}"));
        }
        if correlations.iter().any(|c| !(0.0..=1.0).contains(c))
            || correlations.windows(2).any(|w| w[0] < w[1])
        {
            return Err(validation!(
                "correlations must be descending and within [0, 1]"
            ));
        }
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(validation!(
                "epsilon must be finite and non-negative, got {epsilon}"
            ));
        }
        Ok(Self {
            mean_a,
            mean_b,
            dirs_a,
            dirs_b,
            correlations,
            epsilon,
        })
    }

    pub fn k(&self) -> usize {
        self.correlations.len()
    }

    pub fn dim_left(&self) -> usize {
        self.mean_a.len()
    }

    pub fn dim_right(&self) -> usize {
        self.mean_b.len()
    }

    pub fn correlations(&self) -> &[f64] {
        &self.correlations
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn mean_left(&self) -> ArrayView1<'_, f64> {
        self.mean_a.view()
    }

    pub fn mean_right(&self) -> ArrayView1<'_, f64> {
        self.mean_b.view()
    }

    /// `d_t × k`, one left direction per column.
    pub fn dirs_left(&self) -> ArrayView2<'_, f64> {
        self.dirs_a.view()
    }

    /// `d_v × k`, one right direction per column.
    pub fn dirs_right(&self) -> ArrayView2<'_, f64> {
        self.dirs_b.view()
    }

    /// Serialized form, see [`save_model`].
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        io::to_bytes(self)
    }
}

/// Default component count: `min(d_t, d_v, n − 1)`.
pub fn default_k(n: usize, dim_left: usize, dim_right: usize) -> usize {
    dim_left.min(dim_right).min(n.saturating_sub(1)).max(1)
}

pub fn fit(train: &PairedDataset, epsilon: f64, k: Option<usize>) -> Result<CcaModel> {
    fit_matrices(train.left().vectors(), train.right().vectors(), epsilon, k)
}

/// [`fit`] on raw row-aligned matrices.
pub fn fit_matrices(
    x: ArrayView2<'_, f64>,
    y: ArrayView2<'_, f64>,
    epsilon: f64,
    k: Option<usize>,
) -> Result<CcaModel> {
    let n = x.nrows();
    if y.nrows() != n {
        return Err(validation!("left has {n} rows, right has {}", y.nrows()));
    }
    if n < 2 {
        return Err(validation!("CCA needs at least 2 pairs, got {n}"));
    }
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(validation!(
            "epsilon must be finite and non-negative, got {epsilon}"
        ));
    }
    let (d_t, d_v) = (x.ncols(), y.ncols());
    let k = k.unwrap_or_else(|| default_k(n, d_t, d_v));
    if k == 0 || k > d_t.min(d_v) {
        return Err(validation!(
            "k = {k} components requested, must be between 1 and min({d_t}, {d_v})"
        ));
    }

    let mean_a = x.mean_axis(Axis(0)).expect("n >= 2");
    let mean_b = y.mean_axis(Axis(0)).expect("n >= 2");
    let xc = &x - &mean_a;
    let yc = &y - &mean_b;

    let wx = whitener(cross_covariance(xc.view(), xc.view()), epsilon, Side::Left)?;
    let wy = whitener(cross_covariance(yc.view(), yc.view()), epsilon, Side::Right)?;
    let cxy = to_dmatrix(cross_covariance(xc.view(), yc.view()).view());

    let whitened = &wx * &cxy * &wy;
    let svd = SVD::new(whitened, true, true);
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested Vᵀ");

    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let mut dirs_a = DMatrix::zeros(d_t, k);
    let mut dirs_b = DMatrix::zeros(d_v, k);
    let mut correlations = Vec::with_capacity(k);
    for (j, &src) in order.iter().take(k).enumerate() {
        let mut a = &wx * u.column(src);
        let mut b = &wy * v_t.row(src).transpose();
        let pivot = a.iamax();
        if a[pivot] < 0.0 {
            a.neg_mut();
            b.neg_mut();
        }
        dirs_a.set_column(j, &a);
        dirs_b.set_column(j, &b);
        correlations.push(svd.singular_values[src].clamp(0.0, 1.0));
    }

    Ok(CcaModel {
        mean_a,
        mean_b,
        dirs_a: from_dmatrix(&dirs_a),
        dirs_b: from_dmatrix(&dirs_b),
        correlations,
        epsilon,
    })
}

/// Symmetric inverse square root of the ridged covariance.
fn whitener(cov: Array2<f64>, epsilon: f64, side: Side) -> Result<DMatrix<f64>> {
    let d = cov.nrows();
    let mean_diag = cov.diag().sum() / d as f64;
    if mean_diag <= 0.0 {
        return Err(degenerate!("the {side} side has zero variance"));
    }
    let ridge = epsilon * mean_diag;
    let mut cov = to_dmatrix(cov.view());
    for i in 0..d {
        cov[(i, i)] += ridge;
    }
    let eig = SymmetricEigen::new(cov);
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    if epsilon == 0.0 {
        let tol = max * d as f64 * f64::EPSILON;
        if min <= tol {
            return Err(Error::NumericalRank {
                side,
                message: format!(
                    "smallest covariance eigenvalue {min:e} is below tolerance {tol:e}; \
                     use a positive epsilon"
                ),
            });
        }
    }
    let scale = eig.eigenvalues.map(|l| 1.0 / l.max(ridge).sqrt());
    let v = &eig.eigenvectors;
    Ok(v * DMatrix::from_diagonal(&scale) * v.transpose())
}

/// `(x − mean_a) · dirs_a`.
pub fn project_left(model: &CcaModel, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    project(x, &model.mean_a, &model.dirs_a, Side::Left)
}

/// `(y − mean_b) · dirs_b`.
pub fn project_right(model: &CcaModel, y: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    project(y, &model.mean_b, &model.dirs_b, Side::Right)
}

fn project(
    x: ArrayView2<'_, f64>,
    mean: &Array1<f64>,
    dirs: &Array2<f64>,
    side: Side,
) -> Result<Array2<f64>> {
    if x.ncols() != mean.len() {
        return Err(validation!(
            "{side} projection expects {} columns, got {}",
            mean.len(),
            x.ncols()
        ));
    }
    Ok((&x - mean).dot(dirs))
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use ndarray::{array, s, Array2};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    use super::*;
    use crate::corrstats::pearson;

    fn gaussian(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_simple_fn((rows, cols), || StandardNormal.sample(&mut rng))
    }

    /// Left: 4 columns; right: 3 columns sharing signal with the first two.
    fn correlated(n: usize, seed: u64) -> (Array2<f64>, Array2<f64>) {
        let x = gaussian(n, 4, seed);
        let noise = gaussian(n, 3, seed + 1);
        let mut y = noise.clone();
        y.column_mut(0).scaled_add(1.5, &x.column(0));
        y.column_mut(1).scaled_add(0.5, &x.column(1));
        y.column_mut(2).scaled_add(0.2, &x.column(0));
        (x, y)
    }

    fn column_pearson(a: &Array2<f64>, i: usize, b: &Array2<f64>, j: usize) -> f64 {
        pearson(&a.column(i).to_vec(), &b.column(j).to_vec()).unwrap()
    }

    #[test]
    fn self_correlation_is_one() {
        let x = gaussian(200, 5, 1);
        let model = fit_matrices(x.view(), x.view(), 0.0, None).unwrap();
        assert_eq!(model.k(), 5);
        for &c in model.correlations() {
            assert_abs_diff_eq!(c, 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn projection_reproduces_correlations() {
        let (x, y) = correlated(500, 3);
        let model = fit_matrices(x.view(), y.view(), 0.0, None).unwrap();
        let px = project_left(&model, x.view()).unwrap();
        let py = project_right(&model, y.view()).unwrap();
        for (j, &c) in model.correlations().iter().enumerate() {
            assert_abs_diff_eq!(column_pearson(&px, j, &py, j), c, epsilon = 1e-6);
        }
    }

    #[test]
    fn components_are_uncorrelated_within_each_side() {
        let (x, y) = correlated(500, 5);
        let model = fit_matrices(x.view(), y.view(), 0.0, None).unwrap();
        let px = project_left(&model, x.view()).unwrap();
        let py = project_right(&model, y.view()).unwrap();
        for i in 0..model.k() {
            for j in 0..model.k() {
                if i != j {
                    assert!(column_pearson(&px, i, &px, j).abs() < 1e-6);
                    assert!(column_pearson(&py, i, &py, j).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn correlations_descend_and_larger_k_extends() {
        let (x, y) = correlated(400, 9);
        let small = fit_matrices(x.view(), y.view(), 1e-4, Some(1)).unwrap();
        let large = fit_matrices(x.view(), y.view(), 1e-4, Some(3)).unwrap();
        assert!(large.correlations().windows(2).all(|w| w[0] >= w[1]));
        assert_abs_diff_eq!(
            small.correlations()[0],
            large.correlations()[0],
            epsilon = 1e-8
        );
        let lead = large.dirs_left().slice(s![.., 0..1]).to_owned();
        for (a, b) in small.dirs_left().iter().zip(lead.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        }
    }

    #[test]
    fn exchanging_sides_keeps_correlations() {
        let (x, y) = correlated(300, 13);
        let forward = fit_matrices(x.view(), y.view(), 1e-4, None).unwrap();
        let backward = fit_matrices(y.view(), x.view(), 1e-4, None).unwrap();
        for (a, b) in forward.correlations().iter().zip(backward.correlations()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
        // directions swap up to a shared sign per component
        let (fa, bb) = (forward.dirs_left(), backward.dirs_right());
        for j in 0..forward.k().min(2) {
            let sign = if fa[[0, j]] * bb[[0, j]] < 0.0 {
                -1.0
            } else {
                1.0
            };
            for i in 0..fa.nrows() {
                assert_abs_diff_eq!(fa[[i, j]], sign * bb[[i, j]], epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn sign_convention() {
        let (x, y) = correlated(300, 17);
        let model = fit_matrices(x.view(), y.view(), 1e-4, None).unwrap();
        for col in model.dirs_left().columns() {
            let pivot = col
                .iter()
                .copied()
                .fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
            assert!(pivot > 0.0);
        }
    }

    #[test]
    fn projecting_the_mean_gives_zero() {
        let (x, y) = correlated(100, 19);
        let model = fit_matrices(x.view(), y.view(), 1e-4, None).unwrap();
        let means = Array2::from_shape_fn((3, 4), |(_, j)| model.mean_left()[j]);
        let p = project_left(&model, means.view()).unwrap();
        assert!(p.iter().all(|v| v.abs() < 1e-12));
        let means = Array2::from_shape_fn((2, 3), |(_, j)| model.mean_right()[j]);
        let p = project_right(&model, means.view()).unwrap();
        assert!(p.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn identity_direction_projection() {
        let model = CcaModel::from_parts(
            array![0.0, 0.0],
            array![0.0, 0.0],
            array![[1.0], [0.0]],
            array![[1.0], [0.0]],
            vec![0.5],
            0.0,
        )
        .unwrap();
        assert_eq!(
            project_left(&model, array![[3.0, 7.0]].view()).unwrap(),
            array![[3.0]]
        );
    }

    #[test]
    fn projection_dimension_mismatch() {
        let (x, y) = correlated(100, 23);
        let model = fit_matrices(x.view(), y.view(), 1e-4, None).unwrap();
        assert!(matches!(
            project_left(&model, y.view()),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            project_right(&model, x.view()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn singular_covariance_without_ridge() {
        let mut x = gaussian(100, 3, 29);
        let first = x.column(0).to_owned();
        x.column_mut(2).assign(&first);
        let y = gaussian(100, 3, 31);
        match fit_matrices(x.view(), y.view(), 0.0, None) {
            Err(Error::NumericalRank { side, .. }) => assert_eq!(side, Side::Left),
            other => panic!("expected a rank error, got {other:?}"),
        }
        match fit_matrices(y.view(), x.view(), 0.0, None) {
            Err(Error::NumericalRank { side, .. }) => assert_eq!(side, Side::Right),
            other => panic!("expected a rank error, got {other:?}"),
        }
        // a ridge makes the same data fittable
        assert!(fit_matrices(x.view(), y.view(), 1e-4, None).is_ok());
    }

    #[test]
    fn too_many_components() {
        let (x, y) = correlated(100, 37);
        assert!(matches!(
            fit_matrices(x.view(), y.view(), 1e-4, Some(4)),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            fit_matrices(x.view(), y.view(), 1e-4, Some(0)),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn default_k_respects_sample_count() {
        assert_eq!(default_k(10_000, 50, 40), 40);
        assert_eq!(default_k(3, 50, 40), 2);
        let x = gaussian(3, 5, 41);
        let y = gaussian(3, 4, 43);
        assert_eq!(fit_matrices(x.view(), y.view(), 1e-4, None).unwrap().k(), 2);
    }

    #[test]
    fn constant_side_is_degenerate() {
        let x = Array2::<f64>::ones((10, 2));
        let y = gaussian(10, 2, 47);
        assert!(matches!(
            fit_matrices(x.view(), y.view(), 1e-4, None),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn rejects_bad_epsilon() {
        let (x, y) = correlated(50, 53);
        assert!(fit_matrices(x.view(), y.view(), -1.0, None).is_err());
        assert!(fit_matrices(x.view(), y.view(), f64::NAN, None).is_err());
    }
}
