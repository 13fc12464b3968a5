//! Dense agent-state matrices, the stochastic weight vector `r` and the
//! r-weighted norm.
//!
//! Row `i` of a [`StateMatrix`] is agent `i`'s decision variable in `R^d`.
//! The r-norm of an `n x d` matrix is `sqrt(sum_i r_i * |row_i|^2)`.

use nalgebra::{DMatrix, RowDVector};

use crate::error::{Error, Result};

/// Sum-to-one tolerance after normalization.
const SUM_TOL: f64 = 1e-12;

/// Strictly positive weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticVector {
    entries: Vec<f64>,
    r_min: f64,
}

impl StochasticVector {
    /// Builds a stochastic vector by normalizing `raw` by its sum.
    ///
    /// Every entry must be finite and strictly positive.
    pub fn new(raw: Vec<f64>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidStochasticVector("empty".into()));
        }
        if let Some((i, v)) = raw.iter().enumerate().find(|(_, v)| !v.is_finite() || **v <= 0.0) {
            return Err(Error::InvalidStochasticVector(format!(
                "entry {i} is {v}; entries must be finite and strictly positive"
            )));
        }
        let sum: f64 = raw.iter().sum();
        let entries: Vec<f64> = raw.iter().map(|v| v / sum).collect();
        let total: f64 = entries.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidStochasticVector(format!(
                "entries sum to {total} after normalization"
            )));
        }
        let r_min = entries.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Self { entries, r_min })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    /// `sum_i r_i^2`.
    pub fn squared_l2(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum()
    }

    pub fn as_row(&self) -> RowDVector<f64> {
        RowDVector::from_row_slice(&self.entries)
    }

    pub(crate) fn check_len(&self, n: usize, what: &str) -> Result<()> {
        if self.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{what} has {n} rows but r has {} entries",
                self.len()
            )));
        }
        Ok(())
    }
}

impl std::ops::Index<usize> for StochasticVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.entries[i]
    }
}

/// `n x d` matrix of finite reals; row `i` is agent `i`'s state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateMatrix(DMatrix<f64>);

impl StateMatrix {
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        for col in 0..m.ncols() {
            for row in 0..m.nrows() {
                if !m[(row, col)].is_finite() {
                    return Err(Error::NonFinite { row, col });
                }
            }
        }
        Ok(Self(m))
    }

    /// Builds from row-major nested vectors.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_matrix(DMatrix::from_fn(n, d, |i, k| rows[i][k]))
    }

    pub fn zeros(n: usize, d: usize) -> Self {
        Self(DMatrix::zeros(n, d))
    }

    pub(crate) fn from_unchecked(m: DMatrix<f64>) -> Self {
        Self(m)
    }

    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.0.ncols()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.0.row(i).iter().copied().collect()
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.0[(i, k)]
    }
}

/// `sqrt(sum_i r_i |M_i|^2)`.
pub fn r_norm(m: &StateMatrix, r: &StochasticVector) -> Result<f64> {
    r.check_len(m.nrows(), "matrix")?;
    Ok(r_norm_raw(m.as_matrix(), r))
}

/// Weighted mean `r^T X` as a length-`d` row.
pub fn weighted_mean(x: &StateMatrix, r: &StochasticVector) -> Result<Vec<f64>> {
    r.check_len(x.nrows(), "state")?;
    Ok(weighted_mean_raw(x.as_matrix(), r).iter().copied().collect())
}

/// Disagreement matrix `D = X - 1 xbar` and its r-norm `delta`.
pub fn deviation(x: &StateMatrix, r: &StochasticVector) -> Result<(StateMatrix, f64)> {
    r.check_len(x.nrows(), "state")?;
    let (d, delta) = deviation_raw(x.as_matrix(), r);
    Ok((StateMatrix(d), delta))
}

pub(crate) fn r_norm_sq_raw(m: &DMatrix<f64>, r: &StochasticVector) -> f64 {
    let mut acc = 0.0;
    for i in 0..m.nrows() {
        let row_sq: f64 = m.row(i).iter().map(|v| v * v).sum();
        acc += r[i] * row_sq;
    }
    acc
}

pub(crate) fn r_norm_raw(m: &DMatrix<f64>, r: &StochasticVector) -> f64 {
    r_norm_sq_raw(m, r).sqrt()
}

pub(crate) fn weighted_mean_raw(x: &DMatrix<f64>, r: &StochasticVector) -> RowDVector<f64> {
    let mut mean = RowDVector::zeros(x.ncols());
    for i in 0..x.nrows() {
        for k in 0..x.ncols() {
            mean[k] += r[i] * x[(i, k)];
        }
    }
    mean
}

pub(crate) fn deviation_raw(x: &DMatrix<f64>, r: &StochasticVector) -> (DMatrix<f64>, f64) {
    let mean = weighted_mean_raw(x, r);
    let mut d = x.clone();
    for i in 0..d.nrows() {
        let mut row = d.row_mut(i);
        row -= &mean;
    }
    let delta = r_norm_raw(&d, r);
    (d, delta)
}
