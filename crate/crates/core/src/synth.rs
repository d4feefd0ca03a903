//! Seeded generators with known ground truth.
//!
//! Every generator is a pure function of its [`SynthSpec`]. Each random
//! component draws from its own ChaCha20 stream, so changing one parameter
//! (say the noise level) leaves the other components bit-identical.

use nalgebra::DMatrix;
use ndarray::{s, Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::linalg::{condition_number, from_dmatrix};
use crate::repstore::{self, PairedDataset, RepresentationSet};

/// Identifies the random source recorded next to generated files.
pub const RNG_ALGORITHM: &str =
    "chacha20 (rand_chacha 0.9, stream per component) + ziggurat normal (rand_distr 0.5)";

/// Largest condition number accepted for a mixing matrix.
pub const MAX_CONDITION: f64 = 100.0;

// stream ids, one per random component
const LATENT: u64 = 0;
const LEFT_NOISE: u64 = 1;
const RIGHT_NOISE: u64 = 2;
const LEFT_MIX: u64 = 3;
const RIGHT_MIX: u64 = 4;
const TRANSFORM: u64 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Nonlinearity {
    Square,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n: usize,
    pub dim_left: usize,
    pub dim_right: usize,
    pub seed: u64,
    /// Planted canonical correlations, each in `[0, 1)`.
    #[serde(default)]
    pub rho: Vec<f64>,
    /// Signal-to-noise ratio; `None` switches the noise off.
    #[serde(default)]
    pub snr: Option<f64>,
    #[serde(default)]
    pub nonlinearity: Option<Nonlinearity>,
}

impl SynthSpec {
    pub fn new(n: usize, dim_left: usize, dim_right: usize, seed: u64) -> Self {
        Self {
            n,
            dim_left,
            dim_right,
            seed,
            rho: Vec::new(),
            snr: None,
            nonlinearity: None,
        }
    }

    pub fn with_rho(mut self, rho: Vec<f64>) -> Self {
        self.rho = rho;
        self
    }

    pub fn with_snr(mut self, snr: f64) -> Self {
        self.snr = Some(snr);
        self
    }

    pub fn with_nonlinearity(mut self, tag: Nonlinearity) -> Self {
        self.nonlinearity = Some(tag);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(validation!(
                "n = {} but at least 2 samples are needed",
                self.n
            ));
        }
        if self.dim_left == 0 || self.dim_right == 0 {
            return Err(validation!("dimensions must be positive"));
        }
        if let Some(r) = self.rho.iter().find(|r| !(0.0..1.0).contains(*r)) {
            return Err(validation!("rho = {r} outside [0, 1)"));
        }
        if self.rho.len() > self.dim_left.min(self.dim_right) {
            return Err(validation!(
                "{} planted correlations exceed the smaller dimension {}",
                self.rho.len(),
                self.dim_left.min(self.dim_right)
            ));
        }
        if let Some(snr) = self.snr {
            if snr.is_nan() || snr < 0.0 {
                return Err(validation!("snr = {snr} must be non-negative"));
            }
        }
        Ok(())
    }

    fn rng(&self, stream: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    fn gaussian(&self, stream: u64, cols: usize) -> Array2<f64> {
        let mut rng = self.rng(stream);
        Array2::from_shape_simple_fn((self.n, cols), || rng.sample(StandardNormal))
    }

    /// Noise multiplier, `None` when noise is off.
    fn noise_scale(&self) -> Option<f64> {
        self.snr.filter(|s| s.is_finite()).map(|s| 1.0 / s)
    }
}

pub fn sample_ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("s{i:06}")).collect()
}

fn pair(left: Array2<f64>, right: Array2<f64>) -> Result<PairedDataset> {
    let ids = sample_ids(left.nrows());
    PairedDataset::new(
        RepresentationSet::new("left", ids.clone(), left)?,
        RepresentationSet::new("right", ids, right)?,
    )
}

/// Random `d × d` matrix `Q1·diag(s)·Q2ᵀ` with orthogonal `Q1`, `Q2` and
/// singular values log-uniform in `[0.1, 10]`, so the condition number
/// never exceeds [`MAX_CONDITION`].
pub fn random_mixing<R: Rng>(d: usize, rng: &mut R) -> Array2<f64> {
    loop {
        let q1 = random_orthogonal(d, rng);
        let q2 = random_orthogonal(d, rng);
        let s = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(d, |_, _| {
            10f64.powf(rng.random_range(-1.0..=1.0))
        }));
        let m = q1 * s * q2.transpose();
        // guards against rounding in the orthogonal factors
        if condition_number(&m) <= MAX_CONDITION {
            return from_dmatrix(&m);
        }
    }
}

fn random_orthogonal<R: Rng>(d: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    g.qr().q()
}

/// Jointly Gaussian pair whose population canonical correlations are
/// exactly `spec.rho`, padded with independent dimensions and mixed by
/// seeded invertible matrices.
pub fn gaussian_cca_pair(spec: &SynthSpec) -> Result<PairedDataset> {
    spec.validate()?;
    let r = spec.rho.len();
    let z = spec.gaussian(LATENT, r);
    let mut left = spec.gaussian(LEFT_NOISE, spec.dim_left);
    let mut right = spec.gaussian(RIGHT_NOISE, spec.dim_right);
    left.slice_mut(s![.., ..r]).assign(&z);
    for (i, &rho) in spec.rho.iter().enumerate() {
        let mut col = right.column_mut(i);
        col *= (1.0 - rho * rho).sqrt();
        col.scaled_add(rho, &z.column(i));
    }
    let ml = random_mixing(spec.dim_left, &mut spec.rng(LEFT_MIX));
    let mr = random_mixing(spec.dim_right, &mut spec.rng(RIGHT_MIX));
    pair(left.dot(&ml), right.dot(&mr))
}

/// Two independently drawn standard Gaussian sets.
pub fn independent_pair(spec: &SynthSpec) -> Result<PairedDataset> {
    spec.validate()?;
    pair(
        spec.gaussian(LEFT_NOISE, spec.dim_left),
        spec.gaussian(RIGHT_NOISE, spec.dim_right),
    )
}

/// Left is standard Gaussian. Every right column is the square of the first
/// left coordinate plus its own noise scaled by `1/snr`; `snr = 0` leaves
/// only noise.
pub fn nonlinear_pair(spec: &SynthSpec) -> Result<PairedDataset> {
    spec.validate()?;
    let left = spec.gaussian(LEFT_NOISE, spec.dim_left);
    let noise = || spec.gaussian(RIGHT_NOISE, spec.dim_right);
    let right = if spec.snr == Some(0.0) {
        noise()
    } else {
        let signal = left.column(0).mapv(|x| x * x);
        let mut right = Array2::zeros((spec.n, spec.dim_right));
        right
            .axis_iter_mut(Axis(1))
            .for_each(|mut c| c.assign(&signal));
        if let Some(scale) = spec.noise_scale() {
            right.scaled_add(scale, &noise());
        }
        right
    };
    pair(left, right)
}

/// Right = left · T + noise / snr for a seeded matrix `T`, with the noise
/// scaled to the root-mean-square of left · T. Split 90/10 into
/// train and test (the last tenth of the samples is the test split).
///
/// The noise draw does not depend on `snr`, so runs that differ only in
/// `snr` share the same signal and noise directions.
pub fn planted_retrieval(spec: &SynthSpec) -> Result<(PairedDataset, PairedDataset)> {
    spec.validate()?;
    if spec.snr == Some(0.0) {
        return Err(validation!(
            "planted retrieval divides noise by snr, snr = 0 is not allowed"
        ));
    }
    let left = spec.gaussian(LEFT_NOISE, spec.dim_left);
    let transform = if spec.dim_left == spec.dim_right {
        random_mixing(spec.dim_left, &mut spec.rng(TRANSFORM))
    } else {
        let mut rng = spec.rng(TRANSFORM);
        let scale = (spec.dim_left as f64).sqrt().recip();
        Array2::from_shape_simple_fn((spec.dim_left, spec.dim_right), || {
            scale * rng.sample::<f64, _>(StandardNormal)
        })
    };
    let mut right = left.dot(&transform);
    if let Some(scale) = spec.noise_scale() {
        // unit snr means equal signal and noise power per coordinate
        let rms = (right.iter().map(|v| v * v).sum::<f64>() / right.len() as f64).sqrt();
        right.scaled_add(scale * rms, &spec.gaussian(RIGHT_NOISE, spec.dim_right));
    }
    let data = pair(left, right)?;
    let n_test = spec.n / 10;
    let test_ids = data.ids()[spec.n - n_test..].to_vec();
    repstore::split(&data, &test_ids)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cca::fit;
    use crate::error::Error;

    #[test]
    fn same_spec_same_bits() {
        let spec = SynthSpec::new(50, 4, 3, 11).with_rho(vec![0.7]);
        let a = gaussian_cca_pair(&spec).unwrap();
        let b = gaussian_cca_pair(&spec).unwrap();
        assert_eq!(a, b);
        let c = gaussian_cca_pair(&SynthSpec { seed: 12, ..spec }).unwrap();
        assert_ne!(a.left().vectors(), c.left().vectors());
    }

    #[test]
    fn validation() {
        let base = SynthSpec::new(10, 2, 2, 0);
        assert!(matches!(
            independent_pair(&SynthSpec {
                n: 1,
                ..base.clone()
            }),
            Err(Error::Validation(_))
        ));
        assert!(gaussian_cca_pair(&base.clone().with_rho(vec![1.0])).is_err());
        assert!(gaussian_cca_pair(&base.clone().with_rho(vec![0.9999])).is_ok());
        assert!(gaussian_cca_pair(&base.clone().with_rho(vec![0.5, 0.4, 0.3])).is_err());
        assert!(gaussian_cca_pair(&base.clone().with_rho(vec![-0.1])).is_err());
        assert!(nonlinear_pair(&base.clone().with_snr(-1.0)).is_err());
        assert!(planted_retrieval(&SynthSpec::new(40, 2, 2, 0).with_snr(0.0)).is_err());
    }

    #[test]
    fn mixing_is_well_conditioned() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for d in [1, 2, 10, 50] {
            let m = random_mixing(d, &mut rng);
            assert!(condition_number(&crate::linalg::to_dmatrix(m.view())) <= MAX_CONDITION);
        }
    }

    #[test]
    fn planted_correlation_recovered() {
        let spec = SynthSpec::new(20_000, 5, 4, 2).with_rho(vec![0.8, 0.5]);
        let model = fit(&gaussian_cca_pair(&spec).unwrap(), 0.0, None).unwrap();
        let rho = model.correlations();
        assert!((rho[0] - 0.8).abs() < 0.02, "{rho:?}");
        assert!((rho[1] - 0.5).abs() < 0.02, "{rho:?}");
        assert!(rho[2] < 0.05, "{rho:?}");
    }

    #[test]
    fn noise_free_nonlinear_is_exact_square() {
        let data =
            nonlinear_pair(&SynthSpec::new(20, 1, 2, 5).with_nonlinearity(Nonlinearity::Square))
                .unwrap();
        for i in 0..20 {
            let x = data.left().vectors()[[i, 0]];
            assert_eq!(data.right().vectors()[[i, 0]], x * x);
            assert_eq!(data.right().vectors()[[i, 1]], x * x);
        }
    }

    #[test]
    fn planted_split_is_ninety_ten() {
        let (train, test) = planted_retrieval(&SynthSpec::new(200, 6, 6, 1)).unwrap();
        assert_eq!((train.len(), test.len()), (180, 20));
        assert_eq!(test.ids()[0], "s000180");
    }

    #[test]
    fn noise_stream_shared_across_snr() {
        let base = SynthSpec::new(100, 3, 3, 9);
        let (clean, _) = planted_retrieval(&base).unwrap();
        let (a, _) = planted_retrieval(&base.clone().with_snr(2.0)).unwrap();
        let (b, _) = planted_retrieval(&base.with_snr(1.0)).unwrap();
        let na = &a.right().vectors() - &clean.right().vectors();
        let nb = &b.right().vectors() - &clean.right().vectors();
        for (x, y) in na.iter().zip(nb.iter()) {
            assert!((2.0 * x - y).abs() < 1e-9 * (1.0 + y.abs()));
        }
    }
}
