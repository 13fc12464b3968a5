//! Zero-mean communication noise with counter-based seeding.
//!
//! The noise matrix `E(t)` for `(seed, trial, t)` is a pure function of those
//! indices, so independent trials can be sampled in any order or in parallel.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{StateMatrix, StochasticVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind {
    None,
    /// I.i.d. `N(0, sigma_sq)` per coordinate.
    GaussianIid { sigma_sq: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    kind: NoiseKind,
    d: usize,
}

impl NoiseModel {
    pub fn none(d: usize) -> Self {
        Self { kind: NoiseKind::None, d }
    }

    pub fn gaussian(sigma_sq: f64, d: usize) -> Result<Self> {
        if !(sigma_sq >= 0.0) || !sigma_sq.is_finite() {
            return Err(Error::InvalidParameter(format!("sigma_sq = {sigma_sq} must be finite and >= 0")));
        }
        Ok(Self { kind: NoiseKind::GaussianIid { sigma_sq }, d })
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn sigma_sq(&self) -> f64 {
        match self.kind {
            NoiseKind::None => 0.0,
            NoiseKind::GaussianIid { sigma_sq } => sigma_sq,
        }
    }

    /// Declared second-moment bound `gamma = d sigma^2`.
    pub fn gamma(&self) -> f64 {
        self.d as f64 * self.sigma_sq()
    }

    pub fn is_none(&self) -> bool {
        matches!(self.kind, NoiseKind::None) || self.sigma_sq() == 0.0
    }
}

/// Master seed from which every noise draw is derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeededStream {
    pub seed: u64,
}

impl SeededStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    /// Generator for the block of draws at `(trial, t)`.
    pub fn rng(&self, trial: u64, t: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(mix(mix(self.seed ^ 0x6e63_6f5f_6e6f_6973, trial), t));
        rng.set_stream(trial);
        rng
    }

    /// Standard normal for `(trial, t, agent, coordinate)` in an `n x d` block.
    pub fn standard_normal(&self, trial: u64, t: u64, agent: usize, coord: usize, d: usize) -> f64 {
        let mut rng = self.rng(trial, t);
        let skip = agent * d + coord;
        let mut z = 0.0;
        for _ in 0..=skip {
            z = StandardNormal.sample(&mut rng);
        }
        z
    }
}

/// SplitMix64 finalizer over `a + golden * (b + 1)`.
fn mix(a: u64, b: u64) -> u64 {
    let mut z = a.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(b.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `E(t)`: an `n x d` matrix of independent draws.
pub fn sample_noise_matrix(m: &NoiseModel, stream: &SeededStream, trial: u64, t: usize, n: usize) -> Result<StateMatrix> {
    if t < 1 {
        return Err(Error::InvalidParameter("t must be >= 1".into()));
    }
    Ok(StateMatrix::from_unchecked(sample_raw(m, stream, trial, t, n)))
}

pub(crate) fn sample_raw(m: &NoiseModel, stream: &SeededStream, trial: u64, t: usize, n: usize) -> DMatrix<f64> {
    let d = m.d();
    let mut e = DMatrix::zeros(n, d);
    if let NoiseKind::GaussianIid { sigma_sq } = m.kind() {
        if sigma_sq > 0.0 {
            let sd = sigma_sq.sqrt();
            let mut rng = stream.rng(trial, t as u64);
            for i in 0..n {
                for k in 0..d {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    e[(i, k)] = sd * z;
                }
            }
        }
    }
    e
}

/// Exact `E ||r^T E||^2 = d sigma^2 sum_i r_i^2` for i.i.d. noise.
pub fn mean_noise_second_moment(m: &NoiseModel, r: &StochasticVector) -> Result<f64> {
    if !matches!(m.kind(), NoiseKind::GaussianIid { .. }) {
        return Err(Error::Unsupported("mean noise moment is defined for Gaussian i.i.d. noise".into()));
    }
    let v = m.gamma() * r.squared_l2();
    debug_assert!(v <= m.gamma() * (1.0 + 1e-12));
    Ok(v)
}
