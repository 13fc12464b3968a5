//! Time-varying weight-matrix sequences, connectivity analysis and the
//! transition products `Phi(t:s) = A(t-1) ... A(s+1)`.
//!
//! Agents and time steps are 1-based in the public API (`t >= 1`), agents are
//! 0-based indices into matrices.

use std::fmt;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::StochasticVector;
use crate::schedules::PowerLawSchedule;

/// Weights above this threshold count as edges.
pub const EDGE_THRESHOLD: f64 = 1e-12;

const STOCHASTIC_TOL: f64 = 1e-12;

/// Non-negative row-stochastic matrix with `r^T W = r^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix(DMatrix<f64>);

impl WeightMatrix {
    /// Wraps `m` after checking it is square and non-negative. Row sums and
    /// the left-eigenvector property are left to [`validate_weight_matrix`].
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!("weight matrix is {}x{}", m.nrows(), m.ncols())));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("weight matrix has non-finite entries".into()));
        }
        Ok(Self(m))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    /// Smallest strictly positive entry.
    pub fn min_nonzero(&self) -> f64 {
        self.0.iter().copied().filter(|v| *v > EDGE_THRESHOLD).fold(f64::INFINITY, f64::min)
    }

    /// Directed edges `(j, i)` for every `W_ij > threshold`, `i != j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && self.0[(i, j)] > EDGE_THRESHOLD {
                    out.push((j, i));
                }
            }
        }
        out
    }
}

/// `A = (1 - beta) I + beta W`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingMatrix {
    matrix: DMatrix<f64>,
    beta: f64,
}

impl MixingMatrix {
    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

pub fn mixing(w: &WeightMatrix, beta: f64) -> Result<MixingMatrix> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidParameter(format!("beta = {beta} must lie in (0, 1]")));
    }
    Ok(MixingMatrix { matrix: mixing_raw(w.as_matrix(), beta), beta })
}

pub(crate) fn mixing_raw(w: &DMatrix<f64>, beta: f64) -> DMatrix<f64> {
    let n = w.nrows();
    let mut a = w * beta;
    for i in 0..n {
        a[(i, i)] += 1.0 - beta;
    }
    a
}

/// `<k> = ((k - 1) mod n) + 1`, returned 0-based.
fn cyclic_index(k: usize, n: usize) -> usize {
    (k - 1) % n
}

/// Gossip on the pair `(<t>, <t+1>)` with weights `r_j / (r_p + r_q)`.
pub fn cyclic_gossip(n: usize, r: &StochasticVector, t: usize) -> Result<WeightMatrix> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("cyclic gossip needs n >= 2, got {n}")));
    }
    if t < 1 {
        return Err(Error::InvalidParameter("t must be >= 1".into()));
    }
    r.check_len(n, "cyclic gossip")?;
    Ok(WeightMatrix(cyclic_gossip_raw(n, r, t)))
}

fn cyclic_gossip_raw(n: usize, r: &StochasticVector, t: usize) -> DMatrix<f64> {
    let p = cyclic_index(t, n);
    let q = cyclic_index(t + 1, n);
    let mut w = DMatrix::identity(n, n);
    let denom = r[p] + r[q];
    for &i in &[p, q] {
        for &j in &[p, q] {
            w[(i, j)] = r[j] / denom;
        }
    }
    w
}

/// One entry of a [`ValidationReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub pass: bool,
    /// Largest violation found (0 when passing).
    pub worst: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<PropertyCheck>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{:<20} {}  worst={:.3e}", c.name, if c.pass { "PASS" } else { "FAIL" }, c.worst)?;
        }
        Ok(())
    }
}

/// Checks non-negativity, unit row sums, `r^T W = r^T` and the `eta` floor on
/// nonzero entries. Failures are reported, never raised.
pub fn validate_weight_matrix(w: &DMatrix<f64>, r: &StochasticVector, eta: f64) -> ValidationReport {
    let n = w.nrows();
    let mut checks = Vec::with_capacity(4);

    let worst_neg = w.iter().map(|v| (-v).max(0.0)).fold(0.0, f64::max);
    checks.push(PropertyCheck { name: "nonnegative", pass: worst_neg == 0.0, worst: worst_neg });

    if !w.is_square() || n != r.len() {
        checks.push(PropertyCheck { name: "dimensions", pass: false, worst: f64::INFINITY });
        return ValidationReport { checks };
    }

    let worst_row = (0..n).map(|i| (w.row(i).sum() - 1.0).abs()).fold(0.0, f64::max);
    checks.push(PropertyCheck { name: "row_stochastic", pass: worst_row <= STOCHASTIC_TOL, worst: worst_row });

    let worst_left = (0..n)
        .map(|j| ((0..n).map(|i| r[i] * w[(i, j)]).sum::<f64>() - r[j]).abs())
        .fold(0.0, f64::max);
    checks.push(PropertyCheck { name: "left_eigenvector", pass: worst_left <= STOCHASTIC_TOL, worst: worst_left });

    let worst_eta = w
        .iter()
        .filter(|v| **v > EDGE_THRESHOLD)
        .map(|v| (eta - v).max(0.0))
        .fold(0.0, f64::max);
    checks.push(PropertyCheck { name: "min_nonzero_ge_eta", pass: worst_eta <= STOCHASTIC_TOL, worst: worst_eta });

    ValidationReport { checks }
}

#[derive(Debug, Clone, PartialEq)]
enum Generator {
    CyclicGossip,
    Static(DMatrix<f64>),
    /// Explicit matrices `W(1), ..., W(p)`, repeated with period `p`.
    Periodic(Vec<DMatrix<f64>>),
}

/// A weight-matrix sequence `t -> W(t)` with its declared `(B, eta)` and `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSequence {
    n: usize,
    r: StochasticVector,
    generator: Generator,
    eta: f64,
    b: usize,
}

impl GraphSequence {
    /// The cyclic gossip family with `eta` set to the smallest nonzero weight and
    /// `B = n - 1`. Use [`GraphSequence::with_declared`] to override.
    pub fn cyclic_gossip(r: StochasticVector) -> Result<Self> {
        let n = r.len();
        if n < 2 {
            return Err(Error::InvalidParameter(format!("cyclic gossip needs n >= 2, got {n}")));
        }
        let eta = (1..=n).map(|t| WeightMatrix(cyclic_gossip_raw(n, &r, t)).min_nonzero()).fold(f64::INFINITY, f64::min);
        Ok(Self { n, r, generator: Generator::CyclicGossip, eta, b: n - 1 })
    }

    /// A constant sequence `W(t) = w`; declared `eta` is the smallest nonzero
    /// entry and `B` is detected.
    pub fn constant(w: WeightMatrix, r: StochasticVector) -> Result<Self> {
        r.check_len(w.n(), "weight matrix")?;
        let eta = w.min_nonzero();
        let mut g = Self { n: w.n(), r, generator: Generator::Static(w.0), eta, b: 1 };
        g.b = detect_b(&g, 2).unwrap_or(1);
        Ok(g)
    }

    /// The static uniform complete graph `W = 11^T / n`.
    pub fn complete(n: usize) -> Result<Self> {
        let w = WeightMatrix::new(DMatrix::from_element(n, n, 1.0 / n as f64))?;
        Self::constant(w, StochasticVector::uniform(n)?)
    }

    /// A periodic sequence of explicit matrices; `B` is detected over two periods.
    pub fn periodic(mats: Vec<WeightMatrix>, r: StochasticVector) -> Result<Self> {
        let first = mats.first().ok_or_else(|| Error::InvalidParameter("empty matrix sequence".into()))?;
        let n = first.n();
        if mats.iter().any(|m| m.n() != n) {
            return Err(Error::DimensionMismatch("matrices in the sequence differ in size".into()));
        }
        r.check_len(n, "weight matrix")?;
        let eta = mats.iter().map(WeightMatrix::min_nonzero).fold(f64::INFINITY, f64::min);
        let period = mats.len();
        let mut g = Self {
            n,
            r,
            generator: Generator::Periodic(mats.into_iter().map(|m| m.0).collect()),
            eta,
            b: 1,
        };
        g.b = detect_b(&g, 2 * period + 1).unwrap_or(period);
        Ok(g)
    }

    /// Loads matrices from a text file: whitespace-separated rows, one blank
    /// line between time steps, `#` comments ignored.
    pub fn from_file(path: &Path, r: Option<StochasticVector>) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
        let mats = parse_matrix_sequence(&text)?;
        let n = mats[0].n();
        let r = match r {
            Some(r) => r,
            None => StochasticVector::uniform(n)?,
        };
        Self::periodic(mats, r)
    }

    /// Replaces the declared `(B, eta)`. Nothing is checked until [`GraphSequence::validate`].
    pub fn with_declared(mut self, b: usize, eta: f64) -> Self {
        self.b = b;
        self.eta = eta;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> &StochasticVector {
        &self.r
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn period(&self) -> Option<usize> {
        match &self.generator {
            Generator::CyclicGossip => Some(self.n),
            Generator::Static(_) => Some(1),
            Generator::Periodic(m) => Some(m.len()),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.generator {
            Generator::CyclicGossip => "cyclic_gossip",
            Generator::Static(_) => "static",
            Generator::Periodic(_) => "custom",
        }
    }

    /// `W(t)` for `t >= 1`.
    pub fn weight(&self, t: usize) -> DMatrix<f64> {
        assert!(t >= 1, "time steps start at 1");
        match &self.generator {
            Generator::CyclicGossip => cyclic_gossip_raw(self.n, &self.r, t),
            Generator::Static(w) => w.clone(),
            Generator::Periodic(m) => m[(t - 1) % m.len()].clone(),
        }
    }

    pub fn weight_matrix(&self, t: usize) -> WeightMatrix {
        WeightMatrix(self.weight(t))
    }

    /// `lambda = eta r_min / (2 B n^2)` from the declared parameters.
    pub fn lambda(&self) -> Result<f64> {
        lambda_param(self.eta, self.r.r_min(), self.b, self.n)
    }

    /// Checks every matrix over one period (or `horizon` steps) against the
    /// declared `eta` and `r`, and the declared `B` against [`detect_b`].
    pub fn validate(&self, horizon: usize) -> GraphValidation {
        let span = self.period().map_or(horizon, |p| p.max(1));
        let mut failures = Vec::new();
        for t in 1..=span {
            let rep = validate_weight_matrix(&self.weight(t), &self.r, self.eta);
            for c in rep.checks.iter().filter(|c| !c.pass) {
                failures.push(format!("t={t}: {} (worst {:.3e})", c.name, c.worst));
            }
        }
        let window_horizon = self.period().map_or(horizon, |p| (2 * p).max(horizon));
        let detected = detect_b(self, window_horizon);
        match detected {
            Some(b) if b <= self.b => {}
            Some(b) => failures.push(format!("declared B={} but windows of length {} are needed", self.b, b)),
            None => failures.push(format!("not strongly connected within horizon {window_horizon}")),
        }
        GraphValidation { detected_b: detected, failures }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphValidation {
    pub detected_b: Option<usize>,
    pub failures: Vec<String>,
}

impl GraphValidation {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Parses matrices separated by blank lines.
pub fn parse_matrix_sequence(text: &str) -> Result<Vec<WeightMatrix>> {
    let mut mats = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let flush = |rows: &mut Vec<Vec<f64>>, mats: &mut Vec<WeightMatrix>| -> Result<()> {
        if rows.is_empty() {
            return Ok(());
        }
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "matrix {} is not square ({} rows)",
                mats.len() + 1,
                n
            )));
        }
        mats.push(WeightMatrix::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))?);
        rows.clear();
        Ok(())
    };
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            flush(&mut rows, &mut mats)?;
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("line {}: cannot parse '{tok}'", lineno + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    flush(&mut rows, &mut mats)?;
    if mats.is_empty() {
        return Err(Error::InvalidParameter("no matrices found".into()));
    }
    Ok(mats)
}

fn strongly_connected(adj: &[Vec<bool>]) -> bool {
    let n = adj.len();
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                let edge = if forward { adj[u][v] } else { adj[v][u] };
                if edge && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    n <= 1 || (reach(true) && reach(false))
}

/// Smallest `B` such that every window `(t, t+B]` with `t` in `[1, horizon - B]`
/// has a strongly connected union graph. `None` if no `B < horizon` works.
///
/// Exact for periodic sequences once `horizon >= 2 * period`.
pub fn detect_b(g: &GraphSequence, horizon: usize) -> Option<usize> {
    let n = g.n();
    let edges: Vec<Vec<(usize, usize)>> =
        (1..=horizon).map(|t| WeightMatrix(g.weight(t)).edges()).collect();
    'outer: for b in 1..horizon {
        for start in 1..=(horizon - b) {
            let mut adj = vec![vec![false; n]; n];
            for k in (start + 1)..=(start + b) {
                for &(from, to) in &edges[k - 1] {
                    adj[from][to] = true;
                }
            }
            if !strongly_connected(&adj) {
                continue 'outer;
            }
        }
        return Some(b);
    }
    None
}

/// `eta r_min / (2 B n^2)`.
pub fn lambda_param(eta: f64, r_min: f64, b: usize, n: usize) -> Result<f64> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidParameter(format!("eta = {eta} must lie in (0, 1]")));
    }
    if !(r_min > 0.0 && r_min <= 1.0) {
        return Err(Error::InvalidParameter(format!("r_min = {r_min} must lie in (0, 1]")));
    }
    if b < 1 {
        return Err(Error::InvalidParameter("B must be >= 1".into()));
    }
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n = {n} must be >= 2")));
    }
    Ok(eta * r_min / (2.0 * b as f64 * (n * n) as f64))
}

/// `A(t) = (1 - beta(t)) I + beta(t) W(t)`.
pub fn mixing_at(g: &GraphSequence, schedule: &PowerLawSchedule, t: usize) -> DMatrix<f64> {
    mixing_raw(&g.weight(t), schedule.beta(t))
}

/// `Phi(t:s) = A(t-1) ... A(s+1)` with `Phi(s+1:s) = I`. Requires `t > s >= 0`.
pub fn transition_product(g: &GraphSequence, schedule: &PowerLawSchedule, t: usize, s: usize) -> Result<DMatrix<f64>> {
    if t <= s {
        return Err(Error::InvalidParameter(format!("transition product needs t > s (t={t}, s={s})")));
    }
    let n = g.n();
    let mut phi = DMatrix::identity(n, n);
    for k in (s + 1)..t {
        phi = mixing_at(g, schedule, k) * phi;
    }
    Ok(phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn uniform6() -> StochasticVector {
        StochasticVector::uniform(6).unwrap()
    }

    #[test]
    fn cyclic_gossip_first_pair() {
        let w = cyclic_gossip(6, &uniform6(), 1).unwrap();
        let m = w.as_matrix();
        for i in 0..2 {
            assert_eq!(m.row(i).iter().copied().collect::<Vec<_>>(), vec![0.5, 0.5, 0.0, 0.0, 0.0, 0.0]);
        }
        for i in 2..6 {
            for j in 0..6 {
                assert_eq!(m[(i, j)], if i == j { 1.0 } else { 0.0 });
            }
        }
        assert_eq!(cyclic_gossip(6, &uniform6(), 7).unwrap(), w);
    }

    #[test]
    fn cyclic_gossip_wraps_last_pair() {
        let w = cyclic_gossip(6, &uniform6(), 6).unwrap();
        let m = w.as_matrix();
        assert_eq!(m[(5, 0)], 0.5);
        assert_eq!(m[(0, 5)], 0.5);
        assert_eq!(m[(0, 0)], 0.5);
    }

    #[test]
    fn cyclic_gossip_nonuniform_two_agents() {
        let r = StochasticVector::new(vec![0.25, 0.75]).unwrap();
        let w = cyclic_gossip(2, &r, 1).unwrap();
        for i in 0..2 {
            assert_abs_diff_eq!(w.as_matrix()[(i, 0)], 0.25, epsilon = 1e-15);
            assert_abs_diff_eq!(w.as_matrix()[(i, 1)], 0.75, epsilon = 1e-15);
        }
        assert!(validate_weight_matrix(w.as_matrix(), &r, 0.25).all_pass());
    }

    #[test]
    fn cyclic_gossip_rejects_small_n() {
        let r = StochasticVector::uniform(1).unwrap();
        assert!(cyclic_gossip(1, &r, 1).is_err());
    }

    #[test]
    fn validate_examples() {
        let r = StochasticVector::new(vec![0.1, 0.2, 0.7]).unwrap();
        assert!(validate_weight_matrix(&DMatrix::identity(3, 3), &r, 1.0).all_pass());

        for t in 1..=12 {
            let w = cyclic_gossip(6, &uniform6(), t).unwrap();
            assert!(validate_weight_matrix(w.as_matrix(), &uniform6(), 0.5).all_pass(), "t={t}");
        }

        let mut bad = DMatrix::identity(3, 3);
        bad[(1, 1)] = 0.9;
        let rep = validate_weight_matrix(&bad, &r, 0.5);
        assert!(!rep.check("row_stochastic").unwrap().pass);
        assert!(rep.check("nonnegative").unwrap().pass);
    }

    #[test]
    fn validate_flags_eta_and_negativity() {
        let r = StochasticVector::uniform(2).unwrap();
        let w = DMatrix::from_row_slice(2, 2, &[0.9, 0.1, 0.1, 0.9]);
        let rep = validate_weight_matrix(&w, &r, 0.2);
        assert!(!rep.check("min_nonzero_ge_eta").unwrap().pass);
        assert!(rep.check("left_eigenvector").unwrap().pass);
        let neg = DMatrix::from_row_slice(2, 2, &[1.5, -0.5, -0.5, 1.5]);
        assert!(!validate_weight_matrix(&neg, &r, 0.1).check("nonnegative").unwrap().pass);
    }

    #[test]
    fn validate_flags_left_eigenvector() {
        let r = StochasticVector::new(vec![0.25, 0.75]).unwrap();
        let w = DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        let rep = validate_weight_matrix(&w, &r, 0.5);
        assert!(!rep.check("left_eigenvector").unwrap().pass);
    }

    /// Brute-force oracle: union connectivity via transitive closure.
    fn union_connected_closure(g: &GraphSequence, from: usize, len: usize) -> bool {
        let n = g.n();
        let mut reach = vec![vec![false; n]; n];
        for (i, row) in reach.iter_mut().enumerate() {
            row[i] = true;
        }
        for k in (from + 1)..=(from + len) {
            let w = g.weight(k);
            for i in 0..n {
                for j in 0..n {
                    if w[(i, j)] > EDGE_THRESHOLD {
                        reach[j][i] = true;
                    }
                }
            }
        }
        for m in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if reach[i][m] && reach[m][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
        reach.iter().all(|row| row.iter().all(|v| *v))
    }

    #[test]
    fn detect_b_examples() {
        assert_eq!(detect_b(&GraphSequence::complete(4).unwrap(), 4), Some(1));

        let g = GraphSequence::cyclic_gossip(uniform6()).unwrap();
        assert_eq!(detect_b(&g, 12), Some(5));
        // the oracle agrees: every window of 5 connects, some window of 4 does not
        assert!((1..=6).all(|s| union_connected_closure(&g, s, 5)));
        assert!((1..=6).any(|s| !union_connected_closure(&g, s, 4)));

        // node 6 never gossips
        let r5 = StochasticVector::uniform(6).unwrap();
        let mats: Vec<WeightMatrix> = (1..=4).map(|t| cyclic_gossip(6, &r5, t).unwrap()).collect();
        let g = GraphSequence::periodic(mats, r5).unwrap();
        assert_eq!(detect_b(&g, 20), None);
    }

    #[test]
    fn lambda_examples() {
        assert_abs_diff_eq!(lambda_param(1.0, 1.0, 1, 2).unwrap(), 0.125, epsilon = 1e-18);
        let g = GraphSequence::cyclic_gossip(uniform6()).unwrap();
        assert_eq!(g.eta(), 0.5);
        assert_eq!(g.b(), 5);
        assert_abs_diff_eq!(g.lambda().unwrap(), 1.0 / 4320.0, epsilon = 1e-18);
        assert_abs_diff_eq!(lambda_param(0.5, 1.0 / 6.0, 6, 6).unwrap(), 1.0 / 5184.0, epsilon = 1e-18);
        assert!(lambda_param(0.0, 0.5, 1, 2).is_err());
        assert!(lambda_param(0.5, 0.5, 0, 2).is_err());
        assert!(lambda_param(0.5, 0.5, 1, 1).is_err());
        assert!(lambda_param(0.5, 1.5, 1, 2).is_err());
    }

    #[test]
    fn mixing_examples() {
        let w = cyclic_gossip(6, &uniform6(), 1).unwrap();
        assert_eq!(mixing(&w, 1.0).unwrap().as_matrix(), w.as_matrix());
        let id = WeightMatrix::identity(4);
        assert_eq!(mixing(&id, 0.5).unwrap().as_matrix(), &DMatrix::identity(4, 4));
        let a = mixing(&w, 0.21).unwrap();
        let m = a.as_matrix();
        assert_abs_diff_eq!(m[(0, 0)], 0.895, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(0, 1)], 0.105, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(1, 0)], 0.105, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(1, 1)], 0.895, epsilon = 1e-15);
        assert!(mixing(&w, 0.0).is_err());
        assert!(mixing(&w, 1.2).is_err());
        assert_eq!(a.beta(), 0.21);
    }

    #[test]
    fn transition_product_conventions() {
        let g = GraphSequence::cyclic_gossip(uniform6()).unwrap();
        let s = PowerLawSchedule::new(0.0055, 0.77, 0.21, 0.6).unwrap();
        assert_eq!(transition_product(&g, &s, 4, 3).unwrap(), DMatrix::identity(6, 6));
        assert_eq!(transition_product(&g, &s, 5, 3).unwrap(), mixing_at(&g, &s, 4));
        assert!(transition_product(&g, &s, 3, 3).is_err());

        let r = g.r().as_row();
        let ones = nalgebra::DVector::from_element(6, 1.0);
        for (t, sv) in [(10, 1), (30, 7), (25, 24)] {
            let phi = transition_product(&g, &s, t, sv).unwrap();
            let left = &r * &phi - &r;
            assert!(left.amax() <= 1e-10);
            assert!((&phi * &ones - &ones).amax() <= 1e-10);
        }
    }

    #[test]
    fn transition_product_static_power() {
        let w = DMatrix::from_row_slice(3, 3, &[0.5, 0.25, 0.25, 0.25, 0.5, 0.25, 0.25, 0.25, 0.5]);
        let g = GraphSequence::constant(WeightMatrix::new(w.clone()).unwrap(), StochasticVector::uniform(3).unwrap())
            .unwrap();
        let s = PowerLawSchedule::new(0.0, 0.0, 1.0, 0.0).unwrap();
        let mut expected = DMatrix::identity(3, 3);
        for _ in 0..5 {
            expected = &expected * &w;
        }
        let phi = transition_product(&g, &s, 9, 3).unwrap();
        assert!((phi - expected).amax() <= 1e-14);
    }

    #[test]
    fn generated_mixing_matrices_are_stochastic() {
        let r = StochasticVector::new(vec![0.1, 0.3, 0.2, 0.15, 0.25]).unwrap();
        let g = GraphSequence::cyclic_gossip(r.clone()).unwrap();
        let s = PowerLawSchedule::new(0.01, 0.8, 0.5, 0.6).unwrap();
        for t in 1..50 {
            let a = mixing_at(&g, &s, t);
            let rep = validate_weight_matrix(&a, &r, 0.0);
            assert!(rep.check("row_stochastic").unwrap().pass);
            assert!(rep.check("left_eigenvector").unwrap().pass);
        }
    }

    #[test]
    fn periodicity_and_validation() {
        let g = GraphSequence::cyclic_gossip(uniform6()).unwrap();
        assert_eq!(g.period(), Some(6));
        for t in 1..30 {
            assert_eq!(g.weight(t), g.weight(t + 6));
        }
        assert!(g.validate(12).is_valid());
        let wrong = g.clone().with_declared(4, 0.5);
        let v = wrong.validate(12);
        assert!(!v.is_valid());
        assert_eq!(v.detected_b, Some(5));
        let wrong_eta = g.with_declared(5, 0.6);
        assert!(!wrong_eta.validate(12).is_valid());
    }

    #[test]
    fn parse_matrix_file_format() {
        let text = "# two steps\n0.5 0.5\n0.5 0.5\n\n1 0\n0 1\n";
        let mats = parse_matrix_sequence(text).unwrap();
        assert_eq!(mats.len(), 2);
        assert_eq!(mats[1], WeightMatrix::identity(2));
        assert!(parse_matrix_sequence("1 0\n0\n").is_err());
        assert!(parse_matrix_sequence("1 x\n0 1\n").is_err());
        assert!(parse_matrix_sequence("\n\n").is_err());
        let g = GraphSequence::periodic(mats, StochasticVector::uniform(2).unwrap()).unwrap();
        // step 2 is the identity, so single-step windows starting there are disconnected
        assert_eq!(g.b(), 2);
        assert_eq!(g.kind(), "custom");
    }
}
