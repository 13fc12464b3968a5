//! Numerical checks of the contraction, variance-decrease and summation
//! inequalities behind the convergence analysis.
//!
//! Deterministic checks are exact facts and must never fail. Stochastic checks
//! compare Monte Carlo means against bounds with standard-error slack.

use std::fmt;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::dynamics::{self, mean_and_se, SimulationConfig, Simulator};
use crate::error::{Error, Result};
use crate::linalg::{self, StochasticVector};
use crate::network::{mixing_raw, transition_product, GraphSequence};
use crate::presets;
use crate::schedules::{sum_power_bound, PowerLawSchedule};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub instances: usize,
    /// Largest `LHS - RHS` seen (normalized as documented per check);
    /// negative means every instance held with margin.
    pub worst_slack: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub params: Vec<(String, String)>,
    /// Extra findings that do not change `worst_slack`.
    pub notes: Vec<String>,
}

impl CheckReport {
    fn new(name: &str, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            instances: 0,
            worst_slack: f64::NEG_INFINITY,
            tolerance,
            pass: true,
            params: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn observe(&mut self, slack: f64) {
        self.instances += 1;
        if slack > self.worst_slack || slack.is_nan() {
            self.worst_slack = slack;
        }
    }

    fn param(mut self, k: &str, v: impl fmt::Display) -> Self {
        self.params.push((k.into(), v.to_string()));
        self
    }

    fn finish(mut self) -> Self {
        self.pass = self.pass && !self.worst_slack.is_nan() && self.worst_slack <= self.tolerance;
        self
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<4} {:<28} instances={:<7} worst_slack={:+.3e} tol={:.0e}",
            if self.pass { "ok" } else { "FAIL" },
            self.name,
            self.instances,
            self.worst_slack,
            self.tolerance
        )?;
        for (k, v) in &self.params {
            write!(f, " {k}={v}")?;
        }
        for n in &self.notes {
            write!(f, "\n     note: {n}")?;
        }
        Ok(())
    }
}

fn random_r(rng: &mut ChaCha8Rng, n: usize) -> StochasticVector {
    StochasticVector::new((0..n).map(|_| rng.gen_range(0.05..1.0)).collect()).expect("positive weights")
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, n: usize, d: usize, scale: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, d, |_, _| scale * rng.sample::<f64, _>(StandardNormal))
}

fn relative(lhs: f64, rhs: f64) -> f64 {
    if rhs == f64::INFINITY && lhs.is_finite() {
        return -1.0;
    }
    (lhs - rhs) / rhs.abs().max(f64::MIN_POSITIVE)
}

/// Rounding floor for `V_r(u)`: values below it count as zero.
fn vr_floor(u: &[f64], r: &StochasticVector) -> f64 {
    f64::EPSILON * u.iter().zip(r.entries()).map(|(x, ri)| ri * x * x).sum::<f64>()
}

/// `1 r^T`.
fn consensus_projector(r: &StochasticVector) -> DMatrix<f64> {
    let n = r.len();
    DMatrix::from_fn(n, n, |_, j| r[j])
}

/// Window contraction of `Phi(t:s) - 1 r^T` in the `r`-norm.
///
/// Each sample draws `s`, a window length up to `3B` and a random `U`; it checks
/// `||(Phi(t:s) - 1r^T) U||_r <= ||U||_r` and, on a window of exactly `B + 1`,
/// `||(Phi(s+B+1:s) - 1r^T) U||_r^2 <= (1 - lambda B beta(s+B)) ||U||_r^2`.
/// Slack is relative to the right-hand side.
pub fn check_phi_contraction(g: &GraphSequence, schedule: &PowerLawSchedule, samples: usize, seed: u64) -> Result<CheckReport> {
    let lambda = g.lambda()?;
    let b = g.b();
    for t in 1..=(3 * b + 2) {
        if schedule.beta(t + 1) > schedule.beta(t) || !(schedule.beta(t) > 0.0 && schedule.beta(t) <= 1.0) {
            return Err(Error::InvalidParameter("beta must lie in (0, 1] and be non-increasing".into()));
        }
    }
    let proj = consensus_projector(g.r());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = CheckReport::new("phi_contraction", 1e-10);
    for _ in 0..samples {
        let s = rng.gen_range(1..=500);
        let d = rng.gen_range(1..=3);
        let scale = 10f64.powf(rng.gen_range(-3.0..3.0));
        let u = gaussian_matrix(&mut rng, g.n(), d, scale);
        let u_norm = linalg::r_norm_raw(&u, g.r());

        let len = rng.gen_range(1..=3 * b);
        let phi = transition_product(g, schedule, s + len, s)?;
        let lhs = linalg::r_norm_raw(&((phi - &proj) * &u), g.r());
        rep.observe(relative(lhs, u_norm));

        let phi = transition_product(g, schedule, s + b + 1, s)?;
        let lhs = linalg::r_norm_sq_raw(&((phi - &proj) * &u), g.r());
        let rhs = (1.0 - lambda * b as f64 * schedule.beta(s + b)) * u_norm * u_norm;
        rep.observe(relative(lhs, rhs));
    }
    Ok(rep.param("n", g.n()).param("B", b).param("lambda", lambda).finish())
}

/// `V_r(u) = sum_i r_i (u_i - r^T u)^2`.
pub fn v_r(u: &[f64], r: &StochasticVector) -> f64 {
    let m: f64 = u.iter().zip(r.entries()).map(|(a, b)| a * b).sum();
    u.iter().zip(r.entries()).map(|(x, ri)| ri * (x - m).powi(2)).sum()
}

/// Applies `A_1, ..., A_m` to `u` and compares `V_r` at the end against
/// `V_r(u) - sum_k sum_{i<j} H_ij(k) (u_i - u_j)^2` with `H(k) = A_k^T diag(r) A_k`
/// and `u` the vector that `A_k` multiplies. Slack is relative to `V_r(u)`.
pub fn check_vr_identity(a_seq: &[DMatrix<f64>], r: &StochasticVector, u: &[f64]) -> Result<CheckReport> {
    let n = r.len();
    if u.len() != n || a_seq.iter().any(|a| a.shape() != (n, n)) {
        return Err(Error::DimensionMismatch(format!("need n = {n} for u and every matrix")));
    }
    let mut rep = CheckReport::new("vr_identity", 1e-9);
    rep.observe(vr_identity_slack(a_seq, r, u));
    Ok(rep.param("n", n).param("steps", a_seq.len()).finish())
}

fn vr_identity_slack(a_seq: &[DMatrix<f64>], r: &StochasticVector, u0: &[f64]) -> f64 {
    let n = r.len();
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(r.entries()));
    let v0 = v_r(u0, r);
    let mut u = nalgebra::DVector::from_column_slice(u0);
    let mut decrease = 0.0;
    for a in a_seq {
        let h = a.transpose() * &diag * a;
        for i in 0..n {
            for j in i + 1..n {
                decrease += h[(i, j)] * (u[i] - u[j]).powi(2);
            }
        }
        u = a * u;
    }
    let lhs = v_r(u.as_slice(), r);
    let rhs = v0 - decrease;
    (lhs - rhs).abs() / v0.max(vr_floor(u0, r)).max(f64::MIN_POSITIVE)
}

/// Random group-averaging matrix: a random subset averages with weights
/// proportional to `r`, everyone else keeps their value. Satisfies `r^T W = r^T`.
fn group_average(rng: &mut ChaCha8Rng, r: &StochasticVector) -> DMatrix<f64> {
    let n = r.len();
    let members: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    let mass: f64 = (0..n).filter(|&i| members[i]).map(|i| r[i]).sum();
    DMatrix::from_fn(n, n, |i, j| {
        if members[i] && members[j] {
            r[j] / mass
        } else if i == j && !members[i] {
            1.0
        } else {
            0.0
        }
    })
}

/// `V_r` identity over random `r`, random group-averaging sequences with
/// random step sizes, and random `u`.
pub fn vr_identity_suite(samples: usize, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = CheckReport::new("vr_identity", 1e-9);
    for _ in 0..samples {
        let n = rng.gen_range(2..=12);
        let r = random_r(&mut rng, n);
        let steps = rng.gen_range(1..=10);
        let a_seq: Vec<DMatrix<f64>> = (0..steps)
            .map(|_| {
                let w = group_average(&mut rng, &r);
                mixing_raw(&w, rng.gen_range(0.01..=1.0))
            })
            .collect();
        let u: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        rep.observe(vr_identity_slack(&a_seq, &r, &u));
    }
    rep.param("max_n", 12).param("max_steps", 10).finish()
}

/// `sum_l (v_{l+1} - v_l)^2 >= V_r(v) / n^2` for sorted `v`; `None` when
/// `V_r(v) = 0`. Slack is `(V_r/n^2 - sum) / V_r`.
pub fn check_sorted_quotient(v: &[f64], r: &StochasticVector) -> Result<Option<CheckReport>> {
    if v.len() != r.len() {
        return Err(Error::DimensionMismatch("v and r differ in length".into()));
    }
    if v.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("v must be sorted ascending".into()));
    }
    let Some(slack) = sorted_quotient_slack(v, r) else { return Ok(None) };
    let mut rep = CheckReport::new("sorted_quotient", 0.0);
    rep.observe(slack);
    Ok(Some(rep.param("n", v.len()).finish()))
}

fn sorted_quotient_slack(v: &[f64], r: &StochasticVector) -> Option<f64> {
    let vr = v_r(v, r);
    if vr <= vr_floor(v, r) {
        return None;
    }
    let n = v.len() as f64;
    let gaps: f64 = v.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
    Some((vr / (n * n) - gaps) / vr)
}

/// `samples` non-vacuous instances; constant draws are skipped and counted.
pub fn sorted_quotient_suite(samples: usize, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = CheckReport::new("sorted_quotient", 0.0);
    let mut skipped = 0;
    while rep.instances < samples {
        let n = rng.gen_range(2..=12);
        let r = random_r(&mut rng, n);
        let mut v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        // occasional ties and a single outlier stress the gap sum
        if rng.gen_bool(0.2) {
            let k = rng.gen_range(0..n);
            v[k] = v[0];
        }
        if rng.gen_bool(0.2) {
            v[0] += 100.0;
        }
        v.sort_by(f64::total_cmp);
        match sorted_quotient_slack(&v, &r) {
            Some(s) => rep.observe(s),
            None => skipped += 1,
        }
    }
    rep.param("skipped", skipped).finish()
}

/// Outcome of the geometric-recursion bound.
#[derive(Debug, Clone, PartialEq)]
pub struct RecursionOutcome {
    pub report: CheckReport,
    /// Times in `[t0, T)` where `-Delta p(t) <= A p(t) q(t)` fails.
    pub precondition_failures: usize,
    pub first_precondition_failure: Option<usize>,
    pub last_precondition_failure: Option<usize>,
    /// `g(t) <= S p(t)/q(t)` on `[t0, T]`, regardless of the precondition.
    pub bound_holds: bool,
    pub s: f64,
}

/// `g(1) = 0`, `g(t+1) = (1 - q(t)) g(t) + p(t)`, checked against
/// `S p(t)/q(t)` with `S = max(g(t0) q(t0)/p(t0), 1/(1-A))` on `[t0, T]`.
/// The report passes only when the precondition holds on the whole range and
/// the bound holds. Slack is `g q/(S p) - 1`.
pub fn check_recursion_bound(
    p: &dyn Fn(usize) -> f64,
    q: &dyn Fn(usize) -> f64,
    a: f64,
    t0: usize,
    big_t: usize,
) -> Result<RecursionOutcome> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidParameter(format!("A = {a} must lie in (0, 1)")));
    }
    if t0 < 1 || t0 > big_t {
        return Err(Error::InvalidParameter(format!("need 1 <= t0 <= T, got t0={t0}, T={big_t}")));
    }
    for t in 1..=big_t {
        let (pt, qt) = (p(t), q(t));
        if !(pt > 0.0 && qt > 0.0) {
            return Err(Error::InvalidParameter(format!("p and q must be positive (t={t})")));
        }
        if qt >= 1.0 {
            return Err(Error::InvalidParameter(format!("q({t}) = {qt} >= 1")));
        }
        if t < big_t && (p(t + 1) > pt || q(t + 1) > qt) {
            return Err(Error::InvalidParameter(format!("p and q must be non-increasing (t={t})")));
        }
    }
    let mut g = vec![0.0; big_t + 1];
    for t in 1..big_t {
        g[t + 1] = (1.0 - q(t)) * g[t] + p(t);
    }
    let s = (g[t0] * q(t0) / p(t0)).max(1.0 / (1.0 - a));

    let mut failures = 0;
    let (mut first, mut last) = (None, None);
    for t in t0..big_t {
        let neg_dp = p(t) - p(t + 1);
        if neg_dp > a * p(t) * q(t) {
            failures += 1;
            first.get_or_insert(t);
            last = Some(t);
        }
    }

    let mut rep = CheckReport::new("recursion_bound", 1e-12);
    for t in t0..=big_t {
        rep.observe(g[t] * q(t) / (s * p(t)) - 1.0);
    }
    let bound_holds = rep.worst_slack <= rep.tolerance;
    rep = rep.param("A", a).param("t0", t0).param("T", big_t).param("S", s);
    if failures > 0 {
        rep.pass = false;
        rep.notes.push(format!(
            "precondition -dp <= A p q fails at {failures} of {} steps (first t={}, last t={}); bound itself {}",
            big_t - t0,
            first.unwrap_or(0),
            last.unwrap_or(0),
            if bound_holds { "holds" } else { "fails" }
        ));
    }
    Ok(RecursionOutcome {
        report: rep.finish(),
        precondition_failures: failures,
        first_precondition_failure: first,
        last_precondition_failure: last,
        bound_holds,
        s,
    })
}

/// `p = beta^2`, `q = lambda beta` for the reference schedule and network, with
/// `A = 2 c1 / lambda = 0.98`.
pub fn recursion_family_consensus(big_t: usize) -> Result<RecursionOutcome> {
    let s = presets::scalar_schedule();
    let lambda = 1.0 / 4320.0;
    check_recursion_bound(&|t| s.beta(t).powi(2), &|t| lambda * s.beta(t), 0.98, 1, big_t)
}

/// `p = t^-1.5`, `q = 0.5 t^-0.75`, `A = 0.9`, from `t0 = 124`.
pub fn recursion_family_power(big_t: usize) -> Result<RecursionOutcome> {
    check_recursion_bound(&|t| (t as f64).powf(-1.5), &|t| 0.5 * (t as f64).powf(-0.75), 0.9, 124, big_t)
}

/// `||u+v||^2 <= (1+theta)||u||^2 + (1+1/theta)||v||^2` for random vectors
/// (Euclidean) and random matrices (`r`-norm), including near-equality cases
/// `v = theta u`. Slack is relative to the right-hand side.
pub fn check_cauchy_extension(samples: usize, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = CheckReport::new("cauchy_extension", 1e-12);
    for k in 0..samples {
        let theta = 10f64.powf(rng.gen_range(-3.0..3.0));
        let n = rng.gen_range(1..=12);
        let d = rng.gen_range(1..=10);
        let u = gaussian_matrix(&mut rng, n, d, 1.0);
        let scale = 10f64.powf(rng.gen_range(-2.0..2.0));
        let v = if k % 5 == 0 { &u * theta } else { gaussian_matrix(&mut rng, n, d, scale) };
        let rhs = |nu: f64, nv: f64| (1.0 + theta) * nu + (1.0 + 1.0 / theta) * nv;

        let lhs = (&u + &v).norm_squared();
        rep.observe(relative(lhs, rhs(u.norm_squared(), v.norm_squared())));

        let r = random_r(&mut rng, n);
        let lhs = linalg::r_norm_sq_raw(&(&u + &v), &r);
        rep.observe(relative(lhs, rhs(linalg::r_norm_sq_raw(&u, &r), linalg::r_norm_sq_raw(&v, &r))));
    }
    rep.finish()
}

/// Direct partial sums of `(t + tau)^delta` against [`sum_power_bound`] over a
/// grid of `(delta, tau, T)`. Slack is relative to the bound.
pub fn check_sum_power_grid() -> CheckReport {
    let deltas: Vec<f64> = (0..=20).map(|k| -3.0 + 0.25 * k as f64).chain([-1.0 - 1e-6, -1.0 + 1e-6]).collect();
    let taus = [0.0, 0.5, 1.0, 2.0, 5.0, 17.0];
    let horizons = [1usize, 2, 3, 5, 10, 30, 100, 1000, 10_000];
    let mut rep = CheckReport::new("sum_power_bound", 1e-12);
    let mut skipped = 0;
    for &delta in &deltas {
        for &tau in &taus {
            if delta < -1.0 && tau == 0.0 {
                skipped += horizons.len();
                continue;
            }
            let mut sum = 0.0;
            let mut next = 0;
            for t in 1..=*horizons.last().unwrap() {
                sum += (t as f64 + tau).powf(delta);
                if t == horizons[next] {
                    let bound = sum_power_bound(delta, tau, t).expect("valid triple");
                    rep.observe(relative(sum, bound));
                    next += 1;
                }
            }
        }
    }
    rep.param("skipped", skipped).finish()
}

/// Right-hand side of the one-window expected contraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowBound {
    pub contraction: f64,
    pub noise_and_step: f64,
    pub drift: f64,
}

impl WindowBound {
    pub fn total(&self) -> f64 {
        self.contraction + self.noise_and_step + self.drift
    }
}

/// `(1 + lambda B (beta(k) - beta(k+B-1))) delta^2(k)`,
/// `2 B^2 (gamma alpha^2(k) + L^2 beta^2(k))` and `(B L^2 / lambda) alpha^2(k)/beta(k)`.
pub fn window_bound(config: &SimulationConfig, k: usize, delta_sq: f64, gamma_multiplier: f64) -> Result<WindowBound> {
    let lambda = config.graph.lambda()?;
    let b = config.graph.b() as f64;
    let s = &config.schedule;
    let (alpha, beta) = (s.alpha(k), s.beta(k));
    let gamma = config.noise.gamma() * gamma_multiplier;
    let l2 = config.objective.lipschitz().powi(2);
    Ok(WindowBound {
        contraction: (1.0 + lambda * b * (beta - s.beta(k + config.graph.b() - 1))) * delta_sq,
        noise_and_step: 2.0 * b * b * (gamma * alpha * alpha + l2 * beta * beta),
        drift: b * l2 / lambda * alpha * alpha / beta,
    })
}

/// Freezes `X(k)` from the reference trial, runs `trials` independent `B`-step
/// continuations with fresh noise and compares the mean of `delta^2(k+B)`
/// against [`window_bound`] plus three standard errors. Slack is absolute.
pub fn check_window_contraction(config: &SimulationConfig, k: usize, trials: usize, gamma_multiplier: f64) -> Result<CheckReport> {
    if trials < 100 {
        return Err(Error::InvalidParameter(format!("{trials} trials is too few; need at least 100")));
    }
    if k < 1 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    let b = config.graph.b();
    let mut reference = Simulator::new(config, config.trial);
    reference.advance_to(k);
    let xk = reference.state().clone();
    let delta_sq = reference.delta().powi(2);
    let samples: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|j| {
            let mut sim = Simulator::from_state(config, xk.clone(), k, config.trial.wrapping_add(1 + j));
            sim.advance_to(k + b);
            sim.delta().powi(2)
        })
        .collect();
    let (mean, se) = mean_and_se(&samples);
    if !mean.is_finite() {
        return Err(Error::Diverged { t: k + b, reason: "non-finite continuation".into() });
    }
    let bound = window_bound(config, k, delta_sq, gamma_multiplier)?;
    let mut rep = CheckReport::new("window_contraction", 0.0);
    rep.observe(mean - bound.total() - 3.0 * se);
    Ok(rep
        .param("k", k)
        .param("trials", trials)
        .param("delta2_k", format!("{delta_sq:.3e}"))
        .param("mc_mean", format!("{mean:.3e}"))
        .param("rhs", format!("{:.3e}", bound.total()))
        .param("gamma_x", gamma_multiplier)
        .finish())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopePoint {
    pub t: usize,
    pub mean_delta: f64,
    pub std_err: f64,
    /// `sqrt(beta(t)) + alpha(t)/beta(t)`.
    pub envelope: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeReport {
    pub points: Vec<EnvelopePoint>,
    pub max_ratio: f64,
    pub median_ratio: f64,
    /// Max over checkpoints `t >= 1000` is at most three times the median there.
    pub pass: bool,
}

impl fmt::Display for EnvelopeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>8} {:>12} {:>10} {:>12} {:>10}", "t", "E[delta]", "se", "envelope", "ratio")?;
        for p in &self.points {
            writeln!(f, "{:>8} {:>12.4e} {:>10.2e} {:>12.4e} {:>10.4}", p.t, p.mean_delta, p.std_err, p.envelope, p.ratio)?;
        }
        write!(
            f,
            "{} max/median = {:.4}/{:.4}",
            if self.pass { "ok" } else { "FAIL" },
            self.max_ratio,
            self.median_ratio
        )
    }
}

pub const ENVELOPE_FROM: usize = 1000;

/// Monte Carlo `E[delta(t)]` at `checkpoints` against the envelope
/// `sqrt(beta) + alpha/beta`.
pub fn consensus_bound_envelope(config: &SimulationConfig, trials: usize, checkpoints: &[usize]) -> Result<EnvelopeReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    let mut cps = checkpoints.to_vec();
    cps.sort_unstable();
    cps.dedup();
    if cps.first() == Some(&0) {
        return Err(Error::InvalidParameter("checkpoints start at t = 1".into()));
    }
    let per_trial: Vec<Vec<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut sim = Simulator::new(config, trial);
            cps.iter()
                .map(|&t| {
                    sim.advance_to(t);
                    sim.delta()
                })
                .collect()
        })
        .collect();
    let s = &config.schedule;
    let points: Vec<EnvelopePoint> = cps
        .iter()
        .enumerate()
        .map(|(c, &t)| {
            let vals: Vec<f64> = per_trial.iter().map(|v| v[c]).collect();
            let (mean_delta, std_err) = mean_and_se(&vals);
            let envelope = s.beta(t).sqrt() + s.alpha(t) / s.beta(t);
            EnvelopePoint { t, mean_delta, std_err, envelope, ratio: mean_delta / envelope }
        })
        .collect();
    if points.iter().any(|p| !p.mean_delta.is_finite()) {
        return Err(Error::Diverged { t: *cps.last().unwrap_or(&1), reason: "non-finite disagreement".into() });
    }
    let mut tail: Vec<f64> = points.iter().filter(|p| p.t >= ENVELOPE_FROM).map(|p| p.ratio).collect();
    tail.sort_by(f64::total_cmp);
    let (max_ratio, median_ratio) = if tail.is_empty() {
        (0.0, 0.0)
    } else {
        let mid = tail.len() / 2;
        let median = if tail.len() % 2 == 1 { tail[mid] } else { 0.5 * (tail[mid - 1] + tail[mid]) };
        (*tail.last().unwrap(), median)
    };
    Ok(EnvelopeReport { points, max_ratio, median_ratio, pass: max_ratio <= 3.0 * median_ratio })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Deterministic,
    Stochastic,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "deterministic" => Ok(Suite::Deterministic),
            "stochastic" => Ok(Suite::Stochastic),
            "all" => Ok(Suite::All),
            other => Err(Error::InvalidParameter(format!("unknown suite {other:?} (all|deterministic|stochastic)"))),
        }
    }
}

/// The exact checks over their randomized instance sets.
pub fn deterministic_suite(seed: u64) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let reference = presets::converging()?;
    let mut phi = check_phi_contraction(&reference.graph, &reference.schedule, 500, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for _ in 0..100 {
        let n = rng.gen_range(2..=12);
        let g = GraphSequence::cyclic_gossip(random_r(&mut rng, n))?;
        let s = PowerLawSchedule::new(0.0, 0.0, rng.gen_range(0.05..=1.0), rng.gen_range(0.0..=1.0))?;
        let extra = check_phi_contraction(&g, &s, 5, rng.gen())?;
        phi.instances += extra.instances;
        phi.worst_slack = phi.worst_slack.max(extra.worst_slack);
    }
    let complete = GraphSequence::complete(6)?;
    let extra = check_phi_contraction(&complete, &PowerLawSchedule::new(0.0, 0.0, 1.0, 0.0)?, 100, seed)?;
    phi.instances += extra.instances;
    phi.worst_slack = phi.worst_slack.max(extra.worst_slack);
    phi.params = vec![("graphs".into(), "reference+100 random gossip+complete".into())];
    out.push(phi.finish());
    out.push(vr_identity_suite(2000, seed));
    out.push(sorted_quotient_suite(10_000, seed));
    out.push(check_cauchy_extension(10_000, seed));
    out.push(check_sum_power_grid());
    let mut fam = recursion_family_consensus(100_000)?.report;
    fam.name = "recursion_bound[beta^2]".into();
    out.push(fam);
    let mut fam = recursion_family_power(100_000)?.report;
    fam.name = "recursion_bound[t^-1.5]".into();
    out.push(fam);
    Ok(out)
}

/// Monte Carlo checks on the reference configuration.
pub fn stochastic_suite(trials: usize) -> Result<Vec<CheckReport>> {
    let cfg = presets::converging()?;
    let mut out = Vec::new();
    for k in [100, 1000, 10_000] {
        out.push(check_window_contraction(&cfg, k, trials.max(100), 1.0)?);
    }
    let mut moment = presets::noise_only(1)?;
    moment.horizon = 200;
    let pts = dynamics::run_mean_second_moment(&moment, 10_000, &[200])?;
    let mut rep = CheckReport::new("mean_second_moment", 0.05);
    for p in &pts {
        rep.observe((p.mc - p.exact).abs() / p.exact);
    }
    out.push(rep.param("t", 200).param("trials", 10_000).finish());
    let env = consensus_bound_envelope(&cfg, 100, &[1000, 10_000, 100_000])?;
    let mut rep = CheckReport::new("consensus_envelope", 3.0);
    rep.observe(if env.median_ratio > 0.0 { env.max_ratio / env.median_ratio } else { 0.0 });
    out.push(rep.param("trials", 100).finish());
    Ok(out)
}

pub fn run_suite(suite: Suite, seed: u64, trials: usize) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    if matches!(suite, Suite::Deterministic | Suite::All) {
        out.extend(deterministic_suite(seed)?);
    }
    if matches!(suite, Suite::Stochastic | Suite::All) {
        out.extend(stochastic_suite(trials)?);
    }
    Ok(out)
}
