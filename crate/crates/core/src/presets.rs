//! Reference experiment setups: six agents on the cyclic gossip network with
//! uniform weights and communication noise of variance 0.1.

use crate::dynamics::SimulationConfig;
use crate::error::Result;
use crate::linalg::StochasticVector;
use crate::network::GraphSequence;
use crate::noise::NoiseModel;
use crate::objectives::ObjectiveSet;
use crate::schedules::PowerLawSchedule;

pub const AGENTS: usize = 6;
pub const NOISE_VARIANCE: f64 = 0.1;
pub const HORIZON: usize = 100_000;
pub const RECORD_EVERY: usize = 100;

/// Seed for the two L1 targets of the ten-dimensional experiment.
pub const L1_TARGET_SEED: u64 = 2;
pub const L1_TARGET_VARIANCE: f64 = 0.1;

pub fn scalar_schedule() -> PowerLawSchedule {
    PowerLawSchedule { alpha0: 0.0055, nu: 0.77, beta0: 0.21, mu: 0.6, one_time_scale: false }
}

pub fn l1_schedule() -> PowerLawSchedule {
    PowerLawSchedule { alpha0: 0.0075, nu: 0.77, beta0: 0.12, mu: 0.6, one_time_scale: false }
}

fn with_defaults(mut cfg: SimulationConfig, record_states: bool) -> SimulationConfig {
    cfg.record_every = RECORD_EVERY;
    cfg.seed = 1;
    cfg.record_states = record_states;
    cfg
}

/// Scalar problem `f_i(x) = |x - v_i|`, `v_i` alternating `-1, +1`.
pub fn scalar(schedule: PowerLawSchedule) -> Result<SimulationConfig> {
    let r = StochasticVector::uniform(AGENTS)?;
    let cfg = SimulationConfig::new(
        GraphSequence::cyclic_gossip(r.clone())?,
        schedule,
        ObjectiveSet::alternating_abs(r)?,
        NoiseModel::gaussian(NOISE_VARIANCE, 1)?,
        HORIZON,
    )?;
    Ok(with_defaults(cfg, true))
}

/// Two-time-scale run with `(mu, nu) = (0.6, 0.77)`.
pub fn converging() -> Result<SimulationConfig> {
    scalar(scalar_schedule())
}

/// Two-time-scale run with `(mu, nu) = (0.2, 0.3)`.
pub fn slow_exponents() -> Result<SimulationConfig> {
    scalar(PowerLawSchedule { mu: 0.2, nu: 0.3, ..scalar_schedule() })
}

/// `beta = 1` with the given `nu`.
pub fn one_time_scale(nu: f64) -> Result<SimulationConfig> {
    scalar(PowerLawSchedule::one_time_scale(0.0055, nu)?)
}

/// Ten-dimensional L1 problem with two clusters of targets.
pub fn l1_clusters() -> Result<SimulationConfig> {
    let r = StochasticVector::uniform(AGENTS)?;
    let cfg = SimulationConfig::new(
        GraphSequence::cyclic_gossip(r.clone())?,
        l1_schedule(),
        ObjectiveSet::two_cluster_l1(r, 10, L1_TARGET_SEED, L1_TARGET_VARIANCE)?,
        NoiseModel::gaussian(NOISE_VARIANCE, 10)?,
        HORIZON,
    )?;
    Ok(with_defaults(cfg, false))
}

/// Zero objective with the scalar schedule, for noise-only experiments.
pub fn noise_only(d: usize) -> Result<SimulationConfig> {
    let r = StochasticVector::uniform(AGENTS)?;
    let cfg = SimulationConfig::new(
        GraphSequence::cyclic_gossip(r.clone())?,
        scalar_schedule(),
        ObjectiveSet::zero(r, d)?,
        NoiseModel::gaussian(NOISE_VARIANCE, d)?,
        HORIZON,
    )?;
    Ok(with_defaults(cfg, false))
}
