//! The two-time-scale update
//!
//! ```text
//! x_i(t+1) = (1 - beta(t)) x_i(t) + beta(t) (sum_j W_ij(t) x_j(t) + e_i(t)) - alpha(t) g_i(x_i(t))
//! ```
//!
//! or in matrix form `X(t+1) = A(t) X(t) + beta(t) E(t) - alpha(t) G(t)`,
//! together with trajectory recording and Monte Carlo helpers.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, StateMatrix, StochasticVector};
use crate::network::{mixing_raw, GraphSequence};
use crate::noise::{self, NoiseModel, SeededStream};
use crate::objectives::{ObjectiveSet, OptimizerBox};
use crate::schedules::PowerLawSchedule;

/// Steps between finiteness checks.
pub const NAN_GUARD_EVERY: usize = 1000;

#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub graph: GraphSequence,
    pub schedule: PowerLawSchedule,
    pub objective: ObjectiveSet,
    pub noise: NoiseModel,
    /// Last time index; the run produces `X(1), ..., X(T)`.
    pub horizon: usize,
    /// `X(1)`; zero when `None`.
    pub initial: Option<StateMatrix>,
    pub record_every: usize,
    pub seed: u64,
    pub trial: u64,
    /// Keep the full state at every recorded step.
    pub record_states: bool,
}

impl SimulationConfig {
    pub fn new(
        graph: GraphSequence,
        schedule: PowerLawSchedule,
        objective: ObjectiveSet,
        noise: NoiseModel,
        horizon: usize,
    ) -> Result<Self> {
        let cfg = Self {
            graph,
            schedule,
            objective,
            noise,
            horizon,
            initial: None,
            record_every: 100,
            seed: 1,
            trial: 0,
            record_states: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn d(&self) -> usize {
        self.objective.d()
    }

    pub fn r(&self) -> &StochasticVector {
        self.graph.r()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.graph.n();
        if self.objective.n() != n {
            return Err(Error::DimensionMismatch(format!(
                "graph has {n} agents but the objective has {}",
                self.objective.n()
            )));
        }
        if self.objective.r() != self.graph.r() {
            return Err(Error::InvalidParameter("objective and graph use different weight vectors r".into()));
        }
        if self.noise.d() != self.d() {
            return Err(Error::DimensionMismatch(format!(
                "noise has d = {} but the objective has d = {}",
                self.noise.d(),
                self.d()
            )));
        }
        if let Some(x0) = &self.initial {
            if x0.nrows() != n || x0.ncols() != self.d() {
                return Err(Error::DimensionMismatch(format!(
                    "initial state is {}x{}, expected {n}x{}",
                    x0.nrows(),
                    x0.ncols(),
                    self.d()
                )));
            }
        }
        if self.horizon < 1 {
            return Err(Error::InvalidParameter("T must be >= 1".into()));
        }
        if self.record_every < 1 {
            return Err(Error::InvalidParameter("record_every must be >= 1".into()));
        }
        self.schedule.validate()
    }

    pub fn initial_state(&self) -> DMatrix<f64> {
        self.initial
            .as_ref()
            .map_or_else(|| DMatrix::zeros(self.n(), self.d()), |x| x.as_matrix().clone())
    }

    pub fn stream(&self) -> SeededStream {
        SeededStream::new(self.seed)
    }
}

/// `G(t)`: row `i` is `g_i(x_i)`.
fn subgradient_matrix(obj: &ObjectiveSet, x: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, d) = x.shape();
    let mut g = DMatrix::zeros(n, d);
    let mut xi = vec![0.0; d];
    let mut gi = vec![0.0; d];
    for i in 0..n {
        for k in 0..d {
            xi[k] = x[(i, k)];
        }
        obj.locals()[i].subgradient_into(&xi, &mut gi);
        for k in 0..d {
            g[(i, k)] = gi[k];
        }
    }
    g
}

fn step_raw(x: &DMatrix<f64>, t: usize, cfg: &SimulationConfig, trial: u64) -> DMatrix<f64> {
    let (alpha, beta) = (cfg.schedule.alpha(t), cfg.schedule.beta(t));
    let a = mixing_raw(&cfg.graph.weight(t), beta);
    let mut next = &a * x;
    if !cfg.noise.is_none() {
        let e = noise::sample_raw(&cfg.noise, &cfg.stream(), trial, t, cfg.n());
        next += e * beta;
    }
    if alpha != 0.0 && !cfg.objective.is_zero() {
        next -= subgradient_matrix(&cfg.objective, x) * alpha;
    }
    next
}

/// `X(t+1) = A(t) X(t) + beta(t) E(t) - alpha(t) G(t)` with the noise of
/// `config.trial`.
pub fn step(x: &StateMatrix, t: usize, config: &SimulationConfig) -> Result<StateMatrix> {
    check_shape(x, config)?;
    if t < 1 {
        return Err(Error::InvalidParameter("t must be >= 1".into()));
    }
    StateMatrix::from_matrix(step_raw(x.as_matrix(), t, config, config.trial))
}

/// The same update evaluated agent by agent.
pub fn step_rowwise(x: &StateMatrix, t: usize, config: &SimulationConfig) -> Result<StateMatrix> {
    check_shape(x, config)?;
    let (n, d) = (config.n(), config.d());
    let (alpha, beta) = (config.schedule.alpha(t), config.schedule.beta(t));
    let w = config.graph.weight(t);
    let e = noise::sample_raw(&config.noise, &config.stream(), config.trial, t, n);
    let xm = x.as_matrix();
    let mut out = DMatrix::zeros(n, d);
    for i in 0..n {
        let xi = x.row(i);
        let gi = config.objective.subgradient(i, &xi);
        for k in 0..d {
            let received: f64 = (0..n).map(|j| w[(i, j)] * xm[(j, k)]).sum::<f64>() + e[(i, k)];
            out[(i, k)] = (1.0 - beta) * xi[k] + beta * received - alpha * gi[k];
        }
    }
    StateMatrix::from_matrix(out)
}

fn check_shape(x: &StateMatrix, config: &SimulationConfig) -> Result<()> {
    if x.nrows() != config.n() || x.ncols() != config.d() {
        return Err(Error::DimensionMismatch(format!(
            "state is {}x{}, expected {}x{}",
            x.nrows(),
            x.ncols(),
            config.n(),
            config.d()
        )));
    }
    Ok(())
}

/// A single trajectory advanced one step at a time.
pub struct Simulator<'a> {
    config: &'a SimulationConfig,
    x: DMatrix<f64>,
    t: usize,
    trial: u64,
}

impl<'a> Simulator<'a> {
    pub fn new(config: &'a SimulationConfig, trial: u64) -> Self {
        Self { config, x: config.initial_state(), t: 1, trial }
    }

    /// Starts from a given `X(t)`; noise for later steps uses `trial`.
    pub fn from_state(config: &'a SimulationConfig, x: DMatrix<f64>, t: usize, trial: u64) -> Self {
        Self { config, x, t, trial }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn state(&self) -> &DMatrix<f64> {
        &self.x
    }

    /// `X(t) -> X(t+1)`.
    pub fn advance(&mut self) {
        self.x = step_raw(&self.x, self.t, self.config, self.trial);
        self.t += 1;
    }

    pub fn advance_to(&mut self, t: usize) {
        while self.t < t {
            self.advance();
        }
    }

    pub fn delta(&self) -> f64 {
        linalg::deviation_raw(&self.x, self.config.r()).1
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: usize,
    pub delta: f64,
    /// Max over coordinates of the r-weighted spread of agents around the mean.
    pub std_max: f64,
    pub xbar: Vec<f64>,
    pub xbar_norm: f64,
    pub f_gap: f64,
    pub dist_opt: f64,
    /// `sum_{s <= t} alpha(s) delta(s)`.
    pub sum_alpha_delta: f64,
    /// Row-major `n x d` state when state recording is on.
    pub states: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub n: usize,
    pub d: usize,
    pub records: Vec<DiagnosticsRecord>,
    /// Largest `|x_ik(t)|` over every step of the run.
    pub max_abs_state: f64,
}

impl Trajectory {
    pub fn last(&self) -> Option<&DiagnosticsRecord> {
        self.records.last()
    }

    /// Records with `t` greater than `(1 - fraction) * T`.
    pub fn final_window(&self, fraction: f64) -> &[DiagnosticsRecord] {
        let Some(last) = self.records.last() else { return &[] };
        let cutoff = (1.0 - fraction) * last.t as f64;
        let start = self.records.partition_point(|r| (r.t as f64) <= cutoff);
        &self.records[start..]
    }

    /// Largest agent spread (`std_max`) over the final window.
    pub fn window_agent_std(&self, fraction: f64) -> f64 {
        self.final_window(fraction).iter().map(|r| r.std_max).fold(0.0, f64::max)
    }

    /// Temporal standard deviation of `xbar` over the final window, max over
    /// coordinates.
    pub fn window_mean_std(&self, fraction: f64) -> f64 {
        let w = self.final_window(fraction);
        if w.len() < 2 {
            return 0.0;
        }
        (0..self.d)
            .map(|k| {
                let vals: Vec<f64> = w.iter().map(|r| r.xbar[k]).collect();
                let m = vals.iter().sum::<f64>() / vals.len() as f64;
                (vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (vals.len() - 1) as f64).sqrt()
            })
            .fold(0.0, f64::max)
    }

    pub fn record_at(&self, t: usize) -> Option<&DiagnosticsRecord> {
        self.records.binary_search_by_key(&t, |r| r.t).ok().map(|i| &self.records[i])
    }
}

/// A run that hit a non-finite state; `partial` holds the records made so far.
#[derive(Debug, Clone)]
pub struct Aborted {
    pub partial: Trajectory,
    pub t: usize,
    pub reason: String,
}

impl std::fmt::Display for Aborted {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "run aborted at t={}: {}", self.t, self.reason)
    }
}

impl std::error::Error for Aborted {}

impl From<Aborted> for Error {
    fn from(a: Aborted) -> Self {
        Error::Diverged { t: a.t, reason: a.reason }
    }
}

struct Recorder {
    r: StochasticVector,
    box_: Option<OptimizerBox>,
    f_star: f64,
    record_states: bool,
}

impl Recorder {
    fn new(cfg: &SimulationConfig) -> Self {
        let box_ = cfg.objective.optimizer_box().ok();
        let f_star = box_.as_ref().map_or(0.0, |b| cfg.objective.global_value(&b.center()));
        Self { r: cfg.r().clone(), box_, f_star, record_states: cfg.record_states }
    }

    fn record(&self, obj: &ObjectiveSet, x: &DMatrix<f64>, t: usize, delta: f64, sum_ad: f64) -> DiagnosticsRecord {
        let (n, d) = x.shape();
        let mean = linalg::weighted_mean_raw(x, &self.r);
        let xbar: Vec<f64> = mean.iter().copied().collect();
        let std_max = (0..d)
            .map(|k| (0..n).map(|i| self.r[i] * (x[(i, k)] - xbar[k]).powi(2)).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        let xbar_norm = xbar.iter().map(|v| v * v).sum::<f64>().sqrt();
        let f_gap = obj.global_value(&xbar) - self.f_star;
        let dist_opt = self.box_.as_ref().map_or(0.0, |b| b.distance(&xbar));
        let states = self
            .record_states
            .then(|| (0..n).flat_map(|i| (0..d).map(move |k| (i, k))).map(|(i, k)| x[(i, k)]).collect());
        DiagnosticsRecord { t, delta, std_max, xbar, xbar_norm, f_gap, dist_opt, sum_alpha_delta: sum_ad, states }
    }
}

/// Runs `X(1), ..., X(T)`, recording at `t = 1`, every multiple of
/// `record_every`, and `t = T`.
pub fn run(config: &SimulationConfig) -> std::result::Result<Trajectory, Aborted> {
    let recorder = Recorder::new(config);
    let mut sim = Simulator::new(config, config.trial);
    let mut traj = Trajectory { n: config.n(), d: config.d(), records: Vec::new(), max_abs_state: 0.0 };
    let mut sum_ad = 0.0;
    loop {
        let t = sim.t();
        let x = sim.state();
        let check = t % NAN_GUARD_EVERY == 0 || t == config.horizon || t == 1 || t % config.record_every == 0;
        if check && !sim.is_finite() {
            return Err(Aborted { partial: traj, t, reason: "state is not finite".into() });
        }
        let delta = sim.delta();
        sum_ad += config.schedule.alpha(t) * delta;
        let m = x.amax();
        if m > traj.max_abs_state {
            traj.max_abs_state = m;
        }
        if t == 1 || t % config.record_every == 0 || t == config.horizon {
            traj.records.push(recorder.record(&config.objective, x, t, delta, sum_ad));
        }
        if t >= config.horizon {
            break;
        }
        sim.advance();
    }
    Ok(traj)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondMomentPoint {
    pub t: usize,
    /// Monte Carlo mean of `||xbar(t)||^2`.
    pub mc: f64,
    /// Standard error of `mc`.
    pub std_err: f64,
    /// `||xbar(1)||^2 + d sigma^2 ||r||^2 sum_{k<t} beta(k)^2`.
    pub exact: f64,
}

/// Monte Carlo estimate of `E ||xbar(t)||^2` against the exact recursion, for
/// a zero objective. Trials `0..trials` run in parallel.
pub fn run_mean_second_moment(
    config: &SimulationConfig,
    trials: usize,
    checkpoints: &[usize],
) -> Result<Vec<SecondMomentPoint>> {
    if !config.objective.is_zero() {
        return Err(Error::Unsupported("second-moment recursion needs the zero objective".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    let mut cps: Vec<usize> = checkpoints.to_vec();
    cps.sort_unstable();
    cps.dedup();
    if cps.first() == Some(&0) {
        return Err(Error::InvalidParameter("checkpoints start at t = 1".into()));
    }
    let r = config.r();
    let last = cps.last().copied().unwrap_or(1);
    let per_trial: Vec<Vec<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut sim = Simulator::new(config, trial);
            cps.iter()
                .map(|&t| {
                    sim.advance_to(t);
                    let m = linalg::weighted_mean_raw(sim.state(), r);
                    m.iter().map(|v| v * v).sum::<f64>()
                })
                .collect()
        })
        .collect();

    let x1 = linalg::weighted_mean_raw(&config.initial_state(), r);
    let base = x1.iter().map(|v| v * v).sum::<f64>();
    let rate = config.noise.gamma() * r.squared_l2();
    let mut beta_sq = 0.0;
    let mut exact_at = Vec::with_capacity(cps.len());
    let mut idx = 0;
    for t in 1..=last {
        while idx < cps.len() && cps[idx] == t {
            exact_at.push(base + rate * beta_sq);
            idx += 1;
        }
        let b = config.schedule.beta(t);
        beta_sq += b * b;
    }

    Ok(cps
        .iter()
        .enumerate()
        .map(|(c, &t)| {
            let vals: Vec<f64> = per_trial.iter().map(|v| v[c]).collect();
            let (mc, std_err) = mean_and_se(&vals);
            SecondMomentPoint { t, mc, std_err, exact: exact_at[c] }
        })
        .collect())
}

pub(crate) fn mean_and_se(vals: &[f64]) -> (f64, f64) {
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    if vals.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::WeightMatrix;
    use crate::objectives::LocalObjective;
    use approx::assert_abs_diff_eq;

    fn two_agent_avg() -> GraphSequence {
        let w = WeightMatrix::new(DMatrix::from_element(2, 2, 0.5)).unwrap();
        GraphSequence::constant(w, StochasticVector::uniform(2).unwrap()).unwrap()
    }

    fn cfg(graph: GraphSequence, schedule: PowerLawSchedule, objective: ObjectiveSet, noise: NoiseModel) -> SimulationConfig {
        SimulationConfig::new(graph, schedule, objective, noise, 10).unwrap()
    }

    #[test]
    fn exact_averaging_step() {
        let r = StochasticVector::uniform(2).unwrap();
        let c = cfg(
            two_agent_avg(),
            PowerLawSchedule::new(0.0, 0.0, 1.0, 0.0).unwrap(),
            ObjectiveSet::zero(r, 1).unwrap(),
            NoiseModel::none(1),
        );
        let x = StateMatrix::from_rows(&[vec![1.0], vec![-1.0]]).unwrap();
        let next = step(&x, 1, &c).unwrap();
        assert_eq!(next.row(0), vec![0.0]);
        assert_eq!(next.row(1), vec![0.0]);
    }

    #[test]
    fn identity_weights_without_gradient_keep_state() {
        let r = StochasticVector::uniform(3).unwrap();
        let g = GraphSequence::constant(WeightMatrix::identity(3), r.clone()).unwrap();
        let c = cfg(
            g,
            PowerLawSchedule::new(0.0, 0.0, 0.7, 0.3).unwrap(),
            ObjectiveSet::zero(r, 2).unwrap(),
            NoiseModel::none(2),
        );
        let x = StateMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        assert_eq!(step(&x, 4, &c).unwrap(), x);
    }

    #[test]
    fn hand_evaluated_step() {
        let r = StochasticVector::uniform(2).unwrap();
        let obj = ObjectiveSet::new(
            vec![LocalObjective::AbsoluteDeviation(1.0), LocalObjective::AbsoluteDeviation(-1.0)],
            1,
            r,
        )
        .unwrap();
        let c = cfg(two_agent_avg(), PowerLawSchedule::new(0.1, 0.0, 0.5, 0.0).unwrap(), obj.clone(), NoiseModel::none(1));
        let x = StateMatrix::zeros(2, 1);
        assert_eq!(obj.subgradient(0, &[0.0]), vec![-1.0]);
        assert_eq!(obj.subgradient(1, &[0.0]), vec![1.0]);
        let next = step(&x, 1, &c).unwrap();
        assert_abs_diff_eq!(next.get(0, 0), 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(next.get(1, 0), -0.1, epsilon = 1e-15);
    }

    #[test]
    fn matrix_and_row_forms_agree() {
        let r = StochasticVector::new(vec![0.1, 0.2, 0.3, 0.15, 0.25]).unwrap();
        let g = GraphSequence::cyclic_gossip(r.clone()).unwrap();
        let obj = ObjectiveSet::two_cluster_l1(r, 3, 4, 0.5).unwrap();
        let mut c = cfg(g, PowerLawSchedule::new(0.05, 0.8, 0.4, 0.6).unwrap(), obj, NoiseModel::gaussian(0.2, 3).unwrap());
        c.seed = 77;
        let mut x = StateMatrix::from_rows(&(0..5).map(|i| vec![i as f64 * 0.3, -0.2, 1.0 - i as f64]).collect::<Vec<_>>())
            .unwrap();
        for t in 1..40 {
            let a = step(&x, t, &c).unwrap();
            let b = step_rowwise(&x, t, &c).unwrap();
            assert!((a.as_matrix() - b.as_matrix()).amax() <= 1e-12);
            x = a;
        }
    }

    #[test]
    fn step_rejects_wrong_shape() {
        let r = StochasticVector::uniform(2).unwrap();
        let c = cfg(
            two_agent_avg(),
            PowerLawSchedule::new(0.0, 0.0, 1.0, 0.0).unwrap(),
            ObjectiveSet::zero(r, 1).unwrap(),
            NoiseModel::none(1),
        );
        assert!(step(&StateMatrix::zeros(3, 1), 1, &c).is_err());
    }

    #[test]
    fn config_rejects_inconsistent_dimensions() {
        let r = StochasticVector::uniform(2).unwrap();
        let g = two_agent_avg();
        let s = PowerLawSchedule::new(0.0, 0.0, 1.0, 0.0).unwrap();
        assert!(SimulationConfig::new(g.clone(), s, ObjectiveSet::zero(r.clone(), 2).unwrap(), NoiseModel::none(1), 5).is_err());
        let r3 = StochasticVector::uniform(3).unwrap();
        assert!(SimulationConfig::new(g, s, ObjectiveSet::zero(r3, 1).unwrap(), NoiseModel::none(1), 5).is_err());
    }

    #[test]
    fn nan_initial_state_aborts() {
        let r = StochasticVector::uniform(6).unwrap();
        let g = GraphSequence::cyclic_gossip(r.clone()).unwrap();
        let s = PowerLawSchedule::new(0.0, 0.0, 0.5, 0.0).unwrap();
        let mut c = SimulationConfig::new(g, s, ObjectiveSet::zero(r, 1).unwrap(), NoiseModel::none(1), 50).unwrap();
        let mut x0 = DMatrix::zeros(6, 1);
        x0[(2, 0)] = f64::INFINITY;
        c.initial = Some(StateMatrix::from_unchecked(x0));
        let err = run(&c).unwrap_err();
        assert_eq!(err.t, 1);
        assert!(err.partial.records.is_empty());
    }

    #[test]
    fn final_window_selects_tail() {
        let rec = |t| DiagnosticsRecord {
            t,
            delta: 0.0,
            std_max: 0.0,
            xbar: vec![],
            xbar_norm: 0.0,
            f_gap: 0.0,
            dist_opt: 0.0,
            sum_alpha_delta: 0.0,
            states: None,
        };
        let traj = Trajectory { n: 1, d: 1, records: (1..=10).map(|k| rec(k * 10)).collect(), max_abs_state: 0.0 };
        let tail: Vec<usize> = traj.final_window(0.1).iter().map(|r| r.t).collect();
        assert_eq!(tail, vec![100]);
        assert_eq!(traj.final_window(0.3).len(), 3);
        assert_eq!(traj.record_at(40).unwrap().t, 40);
        assert!(traj.record_at(41).is_none());
    }

    fn noise_free(objective: ObjectiveSet, x0: Vec<Vec<f64>>, schedule: PowerLawSchedule, horizon: usize) -> SimulationConfig {
        let r = objective.r().clone();
        let d = objective.d();
        let mut c = SimulationConfig::new(GraphSequence::cyclic_gossip(r).unwrap(), schedule, objective, NoiseModel::none(d), horizon)
            .unwrap();
        c.initial = Some(StateMatrix::from_rows(&x0).unwrap());
        c.record_every = 1;
        c
    }

    #[test]
    fn second_moment_without_noise_is_constant() {
        let r = StochasticVector::uniform(4).unwrap();
        let mut c = noise_free(
            ObjectiveSet::zero(r, 1).unwrap(),
            vec![vec![1.0], vec![2.0], vec![3.0], vec![6.0]],
            PowerLawSchedule::new(0.0, 0.0, 0.3, 0.6).unwrap(),
            50,
        );
        c.noise = NoiseModel::gaussian(0.0, 1).unwrap();
        for p in run_mean_second_moment(&c, 3, &[1, 10, 50]).unwrap() {
            assert_eq!(p.exact, 9.0);
            assert_abs_diff_eq!(p.mc, 9.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn second_moment_one_time_scale_is_linear() {
        let r = StochasticVector::uniform(6).unwrap();
        let g = GraphSequence::cyclic_gossip(r.clone()).unwrap();
        let c = SimulationConfig::new(
            g,
            PowerLawSchedule::one_time_scale(0.0, 0.0).unwrap(),
            ObjectiveSet::zero(r, 2).unwrap(),
            NoiseModel::gaussian(0.1, 2).unwrap(),
            100,
        )
        .unwrap();
        let pts = run_mean_second_moment(&c, 4000, &[11, 51, 101]).unwrap();
        let slope = 2.0 * 0.1 / 6.0;
        for p in &pts {
            assert_abs_diff_eq!(p.exact, slope * (p.t - 1) as f64, epsilon = 1e-12);
            assert!((p.mc - p.exact).abs() <= 4.0 * p.std_err, "{p:?}");
        }
        assert!(run_mean_second_moment(&presets_like_scalar(), 10, &[5]).is_err());
    }

    fn presets_like_scalar() -> SimulationConfig {
        let r = StochasticVector::uniform(6).unwrap();
        SimulationConfig::new(
            GraphSequence::cyclic_gossip(r.clone()).unwrap(),
            PowerLawSchedule::new(0.0055, 0.77, 0.21, 0.6).unwrap(),
            ObjectiveSet::alternating_abs(r).unwrap(),
            NoiseModel::gaussian(0.1, 1).unwrap(),
            3000,
        )
        .unwrap()
    }

    #[test]
    fn determinism_independent_of_record_every() {
        let mut a = presets_like_scalar();
        a.record_every = 7;
        a.record_states = true;
        let mut b = a.clone();
        b.record_every = 1;
        let ta = run(&a).unwrap();
        let tb = run(&b).unwrap();
        for rec in &ta.records {
            let other = tb.record_at(rec.t).unwrap();
            assert_eq!(rec.states, other.states);
            assert_eq!(rec.delta.to_bits(), other.delta.to_bits());
            assert_eq!(rec.sum_alpha_delta.to_bits(), other.sum_alpha_delta.to_bits());
        }
        assert_eq!(ta.max_abs_state, tb.max_abs_state);
        assert!(ta.records.windows(2).all(|w| w[0].t < w[1].t));
        assert_eq!(ta.records.first().unwrap().t, 1);
        assert_eq!(ta.records.last().unwrap().t, 3000);
    }

    #[test]
    fn record_invariants_hold() {
        let traj = run(&presets_like_scalar()).unwrap();
        for r in &traj.records {
            assert!(r.delta >= 0.0 && r.dist_opt >= 0.0 && r.f_gap >= -1e-9);
            assert!(r.std_max <= r.delta + 1e-12);
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(32))]

        #[test]
        fn mean_is_conserved_without_gradient_or_noise(
            n in 2usize..8,
            raw_r in proptest::collection::vec(0.05f64..1.0, 8),
            x0 in proptest::collection::vec(-5.0f64..5.0, 16),
            beta0 in 0.05f64..=1.0,
            mu in 0.0f64..=1.0,
        ) {
            let r = StochasticVector::new(raw_r[..n].to_vec()).unwrap();
            let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![x0[2 * i], x0[2 * i + 1]]).collect();
            let c = noise_free(ObjectiveSet::zero(r.clone(), 2).unwrap(), rows, PowerLawSchedule::new(0.0, 0.0, beta0, mu).unwrap(), 200);
            let traj = run(&c).unwrap();
            let first = &traj.records[0].xbar;
            for rec in &traj.records {
                for k in 0..2 {
                    proptest::prop_assert!((rec.xbar[k] - first[k]).abs() <= 1e-10);
                }
            }
        }

        #[test]
        fn window_contraction_without_gradient_or_noise(
            raw_r in proptest::collection::vec(0.05f64..1.0, 6),
            x0 in proptest::collection::vec(-5.0f64..5.0, 6),
            beta0 in 0.05f64..=1.0,
            mu in 0.0f64..=1.0,
        ) {
            let r = StochasticVector::new(raw_r).unwrap();
            let rows: Vec<Vec<f64>> = x0.iter().map(|v| vec![*v]).collect();
            let c = noise_free(ObjectiveSet::zero(r, 1).unwrap(), rows, PowerLawSchedule::new(0.0, 0.0, beta0, mu).unwrap(), 120);
            let lambda = c.graph.lambda().unwrap();
            let b = c.graph.b();
            let traj = run(&c).unwrap();
            for s in 1..=(120 - b) {
                let d0 = traj.record_at(s).unwrap().delta.powi(2);
                let d1 = traj.record_at(s + b).unwrap().delta.powi(2);
                let factor = 1.0 - lambda * b as f64 * c.schedule.beta(s + b);
                proptest::prop_assert!(d1 <= factor * d0 * (1.0 + 1e-10) + 1e-24, "s={} {} > {}", s, d1, factor * d0);
            }
        }

        #[test]
        fn translation_equivariance(
            shift in -3.0f64..3.0,
            x0 in proptest::collection::vec(-2.0f64..2.0, 6),
        ) {
            let r = StochasticVector::uniform(6).unwrap();
            let base = ObjectiveSet::alternating_abs(r.clone()).unwrap();
            let shifted_locals = base
                .locals()
                .iter()
                .map(|l| match l {
                    LocalObjective::AbsoluteDeviation(v) => LocalObjective::AbsoluteDeviation(v + shift),
                    other => other.clone(),
                })
                .collect();
            let shifted = ObjectiveSet::new(shifted_locals, 1, r).unwrap();
            let s = PowerLawSchedule::new(0.0055, 0.77, 0.21, 0.6).unwrap();
            let rows: Vec<Vec<f64>> = x0.iter().map(|v| vec![*v]).collect();
            let rows_shifted: Vec<Vec<f64>> = x0.iter().map(|v| vec![v + shift]).collect();
            let a = run(&noise_free(base, rows, s, 300)).unwrap();
            let b = run(&noise_free(shifted, rows_shifted, s, 300)).unwrap();
            for (ra, rb) in a.records.iter().zip(&b.records) {
                proptest::prop_assert!((ra.xbar[0] + shift - rb.xbar[0]).abs() <= 1e-9);
            }
        }
    }
}
