//! Separable L1-type local objectives with subgradient oracles.
//!
//! The minimizer set of `sum_i r_i f_i` for these objectives is a box whose
//! per-coordinate interval is the set of weighted medians of the targets.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::linalg::StochasticVector;

/// Grid resolution used to verify optimizer boxes.
const GRID_STEP: f64 = 1e-3;
const GRID_MAX_POINTS: usize = 2_000_000;
const MIN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum LocalObjective {
    /// `|x - v|` for `x` in `R`.
    AbsoluteDeviation(f64),
    /// `||x - v||_1`.
    L1Norm(Vec<f64>),
    Zero,
}

impl LocalObjective {
    /// Target value in coordinate `k`, `None` for the zero objective.
    fn target(&self, k: usize) -> Option<f64> {
        match self {
            Self::AbsoluteDeviation(v) => Some(*v),
            Self::L1Norm(v) => Some(v[k]),
            Self::Zero => None,
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Self::AbsoluteDeviation(v) => (x[0] - v).abs(),
            Self::L1Norm(v) => x.iter().zip(v).map(|(a, b)| (a - b).abs()).sum(),
            Self::Zero => 0.0,
        }
    }

    /// Coordinate-wise `sign(x_k - v_k)`, zero at kinks.
    pub fn subgradient_into(&self, x: &[f64], out: &mut [f64]) {
        for (k, o) in out.iter_mut().enumerate() {
            *o = match self.target(k) {
                Some(v) => sign(x[k] - v),
                None => 0.0,
            };
        }
    }
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveSet {
    locals: Vec<LocalObjective>,
    d: usize,
    lipschitz: f64,
    r: StochasticVector,
}

impl ObjectiveSet {
    pub fn new(locals: Vec<LocalObjective>, d: usize, r: StochasticVector) -> Result<Self> {
        r.check_len(locals.len(), "objective set")?;
        if d == 0 {
            return Err(Error::InvalidParameter("dimension d must be >= 1".into()));
        }
        let mut lipschitz: f64 = 0.0;
        for (i, f) in locals.iter().enumerate() {
            match f {
                LocalObjective::AbsoluteDeviation(v) => {
                    if d != 1 {
                        return Err(Error::DimensionMismatch(format!(
                            "agent {i}: absolute deviation needs d = 1, got d = {d}"
                        )));
                    }
                    if !v.is_finite() {
                        return Err(Error::InvalidParameter(format!("agent {i}: non-finite target")));
                    }
                    lipschitz = lipschitz.max(1.0);
                }
                LocalObjective::L1Norm(v) => {
                    if v.len() != d {
                        return Err(Error::DimensionMismatch(format!(
                            "agent {i}: target has length {} but d = {d}",
                            v.len()
                        )));
                    }
                    if v.iter().any(|x| !x.is_finite()) {
                        return Err(Error::InvalidParameter(format!("agent {i}: non-finite target")));
                    }
                    lipschitz = lipschitz.max((d as f64).sqrt());
                }
                LocalObjective::Zero => {}
            }
        }
        Ok(Self { locals, d, lipschitz, r })
    }

    /// `f_i(x) = |x - v_i|` with `v_i = 2 (i mod 2) - 1` for 1-based `i`.
    pub fn alternating_abs(r: StochasticVector) -> Result<Self> {
        let locals = (1..=r.len())
            .map(|i| LocalObjective::AbsoluteDeviation(2.0 * (i % 2) as f64 - 1.0))
            .collect();
        Self::new(locals, 1, r)
    }

    /// `f_i(x) = ||x - v_i||_1` with `v_i = w1` for odd (1-based) agents and
    /// `w2` for even ones; `w1, w2` drawn i.i.d. `N(0, variance)` from `seed`.
    pub fn two_cluster_l1(r: StochasticVector, d: usize, seed: u64, variance: f64) -> Result<Self> {
        let (w1, w2) = gaussian_targets(d, seed, variance)?;
        let locals = (1..=r.len())
            .map(|i| LocalObjective::L1Norm(if i % 2 == 1 { w1.clone() } else { w2.clone() }))
            .collect();
        Self::new(locals, d, r)
    }

    pub fn zero(r: StochasticVector, d: usize) -> Result<Self> {
        Self::new(vec![LocalObjective::Zero; r.len()], d, r)
    }

    pub fn n(&self) -> usize {
        self.locals.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Bound on subgradient Euclidean norms.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn locals(&self) -> &[LocalObjective] {
        &self.locals
    }

    pub fn r(&self) -> &StochasticVector {
        &self.r
    }

    pub fn is_zero(&self) -> bool {
        self.locals.iter().all(|f| matches!(f, LocalObjective::Zero))
    }

    pub fn subgradient(&self, i: usize, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.d];
        self.locals[i].subgradient_into(x, &mut g);
        g
    }

    pub fn local_value(&self, i: usize, x: &[f64]) -> f64 {
        self.locals[i].value(x)
    }

    /// `sum_i r_i f_i(x)`.
    pub fn global_value(&self, x: &[f64]) -> f64 {
        self.locals.iter().enumerate().map(|(i, f)| self.r[i] * f.value(x)).sum()
    }

    /// One-dimensional slice `sum_i r_i |x - v_ik|` in coordinate `k`.
    fn coordinate_value(&self, k: usize, x: f64) -> f64 {
        self.locals
            .iter()
            .enumerate()
            .filter_map(|(i, f)| f.target(k).map(|v| self.r[i] * (x - v).abs()))
            .sum()
    }

    /// The minimizer box, verified against a grid search per coordinate.
    pub fn optimizer_box(&self) -> Result<OptimizerBox> {
        let mut lo = Vec::with_capacity(self.d);
        let mut hi = Vec::with_capacity(self.d);
        for k in 0..self.d {
            let pts: Vec<(f64, f64)> = self
                .locals
                .iter()
                .enumerate()
                .filter_map(|(i, f)| f.target(k).map(|v| (v, self.r[i])))
                .collect();
            let (a, b) = weighted_median_interval(pts);
            self.verify_interval(k, a, b)?;
            lo.push(a);
            hi.push(b);
        }
        Ok(OptimizerBox { lo, hi })
    }

    fn verify_interval(&self, k: usize, lo: f64, hi: f64) -> Result<()> {
        if !lo.is_finite() || !hi.is_finite() {
            return Ok(());
        }
        let targets: Vec<f64> = self.locals.iter().filter_map(|f| f.target(k)).collect();
        let a = targets.iter().copied().fold(f64::INFINITY, f64::min);
        let b = targets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let step = GRID_STEP.max((b - a) / GRID_MAX_POINTS as f64);
        let steps = ((b - a) / step).ceil() as usize;
        let grid_min = (0..=steps)
            .map(|s| self.coordinate_value(k, (a + s as f64 * step).min(b)))
            .chain(targets.iter().map(|v| self.coordinate_value(k, *v)))
            .fold(f64::INFINITY, f64::min);
        for x in [lo, hi, 0.5 * (lo + hi)] {
            let v = self.coordinate_value(k, x);
            if v > grid_min + MIN_TOL {
                return Err(Error::InvalidParameter(format!(
                    "coordinate {k}: box point {x} has value {v} above grid minimum {grid_min}"
                )));
            }
        }
        Ok(())
    }

    /// Euclidean distance from `x` to the optimizer box.
    pub fn distance_to_optimum(&self, x: &[f64]) -> Result<f64> {
        Ok(self.optimizer_box()?.distance(x))
    }
}

/// Draws the two cluster centres `w1, w2` in `R^d`.
pub fn gaussian_targets(d: usize, seed: u64, variance: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(variance >= 0.0) || !variance.is_finite() {
        return Err(Error::InvalidParameter(format!("variance = {variance} must be >= 0")));
    }
    let normal = Normal::new(0.0, variance.sqrt()).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w1 = (0..d).map(|_| normal.sample(&mut rng)).collect();
    let w2 = (0..d).map(|_| normal.sample(&mut rng)).collect();
    Ok((w1, w2))
}

/// Interval of minimizers of `sum w_i |x - v_i|`; unbounded when empty.
fn weighted_median_interval(mut pts: Vec<(f64, f64)>) -> (f64, f64) {
    if pts.is_empty() {
        return (f64::NEG_INFINITY, f64::INFINITY);
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = pts.iter().map(|p| p.1).sum();
    let half = 0.5 * total * (1.0 - 1e-12);
    let mut cum = 0.0;
    let mut lo = pts[pts.len() - 1].0;
    for &(v, w) in &pts {
        cum += w;
        if cum >= half {
            lo = v;
            break;
        }
    }
    cum = 0.0;
    let mut hi = pts[0].0;
    for &(v, w) in pts.iter().rev() {
        cum += w;
        if cum >= half {
            hi = v;
            break;
        }
    }
    (lo, hi)
}

/// Per-coordinate closed intervals `[lo_k, hi_k]`, possibly unbounded.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl OptimizerBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch("box bounds differ in length".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a <= b)) {
            return Err(Error::InvalidParameter("box needs lo <= hi in every coordinate".into()));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| *a <= *v && *v <= *b)
    }

    pub fn clamp(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(self.lo.iter().zip(&self.hi)).map(|(v, (a, b))| v.max(*a).min(*b)).collect()
    }

    pub fn distance(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.clamp(x))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| if a.is_finite() && b.is_finite() { 0.5 * (a + b) } else { 0.0 })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn reference_setup() -> ObjectiveSet {
        ObjectiveSet::alternating_abs(StochasticVector::uniform(6).unwrap()).unwrap()
    }

    #[test]
    fn alternating_targets() {
        let obj = reference_setup();
        let targets: Vec<f64> = obj
            .locals()
            .iter()
            .map(|f| match f {
                LocalObjective::AbsoluteDeviation(v) => *v,
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(targets, vec![1.0, -1.0, 1.0, -1.0, 1.0, -1.0]);
        assert_eq!(obj.lipschitz(), 1.0);
    }

    #[test]
    fn subgradient_examples() {
        let r = StochasticVector::uniform(1).unwrap();
        let obj = ObjectiveSet::new(vec![LocalObjective::AbsoluteDeviation(1.0)], 1, r.clone()).unwrap();
        assert_eq!(obj.subgradient(0, &[3.0]), vec![1.0]);
        assert_eq!(obj.subgradient(0, &[1.0]), vec![0.0]);

        let obj = ObjectiveSet::new(vec![LocalObjective::L1Norm(vec![0.0, 0.0])], 2, r).unwrap();
        let g = obj.subgradient(0, &[-2.0, 5.0]);
        assert_eq!(g, vec![-1.0, 1.0]);
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert_abs_diff_eq!(norm, 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(obj.lipschitz(), 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn global_value_examples() {
        let obj = reference_setup();
        assert_abs_diff_eq!(obj.global_value(&[0.0]), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(obj.global_value(&[2.0]), 2.0, epsilon = 1e-15);
        let zero = ObjectiveSet::zero(StochasticVector::uniform(3).unwrap(), 2).unwrap();
        assert_eq!(zero.global_value(&[4.0, -1.0]), 0.0);
        assert_eq!(zero.lipschitz(), 0.0);
    }

    #[test]
    fn construction_rejects_mismatched_dimensions() {
        let r = StochasticVector::uniform(2).unwrap();
        assert!(ObjectiveSet::new(vec![LocalObjective::AbsoluteDeviation(1.0); 2], 2, r.clone()).is_err());
        assert!(ObjectiveSet::new(vec![LocalObjective::L1Norm(vec![1.0]); 2], 2, r.clone()).is_err());
        assert!(ObjectiveSet::new(vec![LocalObjective::Zero; 3], 1, r).is_err());
    }

    #[test]
    fn optimizer_box_examples() {
        let b = reference_setup().optimizer_box().unwrap();
        assert_eq!((b.lo.clone(), b.hi.clone()), (vec![-1.0], vec![1.0]));

        let single = ObjectiveSet::new(
            vec![LocalObjective::AbsoluteDeviation(3.0)],
            1,
            StochasticVector::uniform(1).unwrap(),
        )
        .unwrap();
        let b = single.optimizer_box().unwrap();
        assert_eq!((b.lo, b.hi), (vec![3.0], vec![3.0]));

        let obj = ObjectiveSet::two_cluster_l1(StochasticVector::uniform(6).unwrap(), 10, 11, 0.1).unwrap();
        let (w1, w2) = gaussian_targets(10, 11, 0.1).unwrap();
        let b = obj.optimizer_box().unwrap();
        for k in 0..10 {
            assert_eq!(b.lo[k], w1[k].min(w2[k]));
            assert_eq!(b.hi[k], w1[k].max(w2[k]));
        }

        let zero = ObjectiveSet::zero(StochasticVector::uniform(2).unwrap(), 2).unwrap();
        let b = zero.optimizer_box().unwrap();
        assert!(b.lo.iter().all(|v| *v == f64::NEG_INFINITY));
        assert_eq!(b.distance(&[1e9, -3.0]), 0.0);
    }

    #[test]
    fn unequal_weights_pick_heavier_side() {
        let r = StochasticVector::new(vec![0.4, 0.6]).unwrap();
        let obj = ObjectiveSet::new(
            vec![LocalObjective::AbsoluteDeviation(-1.0), LocalObjective::AbsoluteDeviation(1.0)],
            1,
            r,
        )
        .unwrap();
        let b = obj.optimizer_box().unwrap();
        assert_eq!((b.lo, b.hi), (vec![1.0], vec![1.0]));
    }

    /// Dense 1-D grid search oracle, independent of the weighted-median routine.
    fn grid_min(obj: &ObjectiveSet, lo: f64, hi: f64) -> f64 {
        let steps = 40_000;
        (0..=steps)
            .map(|s| obj.global_value(&[lo + (hi - lo) * s as f64 / steps as f64]))
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn box_points_attain_grid_minimum() {
        let obj = reference_setup();
        let b = obj.optimizer_box().unwrap();
        let m = grid_min(&obj, -3.0, 3.0);
        for x in [b.lo[0], b.hi[0], b.center()[0]] {
            assert_abs_diff_eq!(obj.global_value(&[x]), m, epsilon = 1e-9);
        }
        assert_abs_diff_eq!(m, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn distance_examples() {
        let obj = reference_setup();
        assert_eq!(obj.distance_to_optimum(&[0.3]).unwrap(), 0.0);
        assert_abs_diff_eq!(obj.distance_to_optimum(&[2.0]).unwrap(), 1.0, epsilon = 1e-15);
        let b = OptimizerBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(b.distance(&[2.0, -1.0]), 2f64.sqrt(), epsilon = 1e-15);
        assert!(OptimizerBox::new(vec![1.0], vec![0.0]).is_err());
    }

    fn random_l1() -> impl Strategy<Value = (Vec<f64>, Vec<Vec<f64>>)> {
        (1usize..7, 1usize..4).prop_flat_map(|(n, d)| {
            (
                prop::collection::vec(0.05f64..1.0, n),
                prop::collection::vec(prop::collection::vec(-3.0f64..3.0, d), n),
            )
        })
    }

    proptest! {
        #[test]
        fn subgradient_inequality_and_bounds(
            (raw, targets) in random_l1(),
            seed_x in prop::collection::vec(-5.0f64..5.0, 3),
            seed_y in prop::collection::vec(-5.0f64..5.0, 3),
        ) {
            let d = targets[0].len();
            let r = StochasticVector::new(raw).unwrap();
            let obj = ObjectiveSet::new(targets.into_iter().map(LocalObjective::L1Norm).collect(), d, r).unwrap();
            let x = &seed_x[..d];
            let y = &seed_y[..d];
            let l = obj.lipschitz();
            for i in 0..obj.n() {
                let g = obj.subgradient(i, x);
                let lin: f64 = g.iter().zip(y.iter().zip(x)).map(|(gk, (yk, xk))| gk * (yk - xk)).sum();
                prop_assert!(obj.local_value(i, y) >= obj.local_value(i, x) + lin - 1e-12);
                let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
                prop_assert!(gnorm <= l + 1e-15);
                let dist = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                prop_assert!((obj.local_value(i, x) - obj.local_value(i, y)).abs() <= l * dist + 1e-12);
            }
        }

        #[test]
        fn weighted_median_box_is_optimal(
            raw in prop::collection::vec(0.05f64..1.0, 1..7),
            vals in prop::collection::vec(-3.0f64..3.0, 7),
        ) {
            let n = raw.len();
            let r = StochasticVector::new(raw).unwrap();
            let locals = vals[..n].iter().map(|v| LocalObjective::AbsoluteDeviation(*v)).collect();
            let obj = ObjectiveSet::new(locals, 1, r).unwrap();
            let b = obj.optimizer_box().unwrap();
            let m = grid_min(&obj, -3.5, 3.5);
            for x in [b.lo[0], b.hi[0], b.center()[0]] {
                prop_assert!(obj.global_value(&[x]) <= m + 1e-9);
            }
        }
    }
}
