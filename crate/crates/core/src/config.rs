//! Experiment files: flat `key = value` lines, dotted groups, `#` comments.
//!
//! ```text
//! n = 6
//! d = 1
//! T = 100000
//! seed = 1
//! graph.type = cyclic_gossip
//! objective.type = absolute_deviation
//! objective.v = alternating
//! noise.kind = gaussian
//! noise.sigma_sq = 0.1
//! schedule.alpha0 = 0.0055
//! schedule.nu = 0.77
//! schedule.beta0 = 0.21
//! schedule.mu = 0.6
//! ```
//!
//! Lists use `,` between entries and `;` between rows.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;

use crate::dynamics::SimulationConfig;
use crate::error::{Error, Result};
use crate::linalg::{StateMatrix, StochasticVector};
use crate::network::{GraphSequence, WeightMatrix};
use crate::noise::NoiseModel;
use crate::objectives::{gaussian_targets, LocalObjective, ObjectiveSet};
use crate::schedules::PowerLawSchedule;

pub const SEED_ENV: &str = "NCO_SEED";

const KEYS: &[&str] = &[
    "n",
    "d",
    "T",
    "seed",
    "record_every",
    "trials",
    "record_states",
    "x0",
    "graph.type",
    "graph.r",
    "graph.W",
    "graph.file",
    "graph.B",
    "graph.eta",
    "objective.type",
    "objective.v",
    "noise.kind",
    "noise.sigma_sq",
    "schedule.alpha0",
    "schedule.nu",
    "schedule.beta0",
    "schedule.mu",
    "schedule.one_time_scale",
];

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSpec {
    CyclicGossip,
    Static(Vec<Vec<f64>>),
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveKind {
    AbsoluteDeviation,
    L1Norm,
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TargetSpec {
    /// `v_i = 2 (i mod 2) - 1`, repeated across coordinates.
    Alternating,
    /// One row per agent.
    Values(Vec<Vec<f64>>),
    /// Odd agents get `w1`, even agents `w2`, both `N(0, variance)` from `seed`.
    Gaussian { seed: u64, variance: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub d: usize,
    pub horizon: usize,
    /// `None` defers to `--seed` or the environment.
    pub seed: Option<u64>,
    pub record_every: usize,
    pub trials: usize,
    pub record_states: bool,
    pub x0: Option<Vec<Vec<f64>>>,
    pub graph: GraphSpec,
    /// `None` means uniform.
    pub r: Option<Vec<f64>>,
    pub b: Option<usize>,
    pub eta: Option<f64>,
    pub objective: ObjectiveKind,
    pub targets: Option<TargetSpec>,
    /// `None` means noise-free.
    pub sigma_sq: Option<f64>,
    pub schedule: PowerLawSchedule,
}

struct Entry {
    line: usize,
    value: String,
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Config { line, msg: msg.into() }
}

struct Fields {
    map: BTreeMap<String, Entry>,
}

impl Fields {
    fn get(&self, key: &str) -> Option<&Entry> {
        self.map.get(key)
    }

    fn required(&self, key: &str) -> Result<&Entry> {
        self.get(key).ok_or_else(|| Error::MissingKey(key.into()))
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse()
                .map(Some)
                .map_err(|_| err(e.line, format!("`{key}`: cannot parse {:?}", e.value))),
        }
    }

    fn parse_required<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.required(key)?;
        Ok(self.parse(key)?.expect("present"))
    }

    fn rows(&self, key: &str) -> Result<Option<Vec<Vec<f64>>>> {
        self.get(key).map(|e| parse_rows(&e.value).map_err(|m| err(e.line, format!("`{key}`: {m}")))).transpose()
    }
}

fn parse_rows(s: &str) -> std::result::Result<Vec<Vec<f64>>, String> {
    s.split(';')
        .map(|row| {
            row.split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| format!("bad number {:?}", x.trim())))
                .collect()
        })
        .collect()
}

fn fmt_rows(rows: &[Vec<f64>]) -> String {
    rows.iter()
        .map(|r| r.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", "))
        .collect::<Vec<_>>()
        .join("; ")
}

fn parse_gaussian(s: &str) -> Option<(u64, f64)> {
    let inner = s.strip_prefix("gaussian(")?.strip_suffix(')')?;
    let (a, b) = inner.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (k, v) = content.split_once('=').ok_or_else(|| err(line, format!("expected `key = value`, got {content:?}")))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(err(line, format!("unknown key `{k}`")));
            }
            if map.insert(k.to_string(), Entry { line, value: v.to_string() }).is_some() {
                return Err(err(line, format!("duplicate key `{k}`")));
            }
        }
        let f = Fields { map };

        let graph_entry = f.required("graph.type")?;
        let graph = match graph_entry.value.as_str() {
            "cyclic_gossip" => GraphSpec::CyclicGossip,
            "static" => GraphSpec::Static(f.rows("graph.W")?.ok_or_else(|| Error::MissingKey("graph.W".into()))?),
            "custom-from-file" => GraphSpec::File(PathBuf::from(&f.required("graph.file")?.value)),
            other => {
                return Err(err(
                    graph_entry.line,
                    format!("`graph.type`: {other:?} is not cyclic_gossip, static or custom-from-file"),
                ))
            }
        };
        let r = f.rows("graph.r")?.map(|rows| rows.concat());

        let obj_entry = f.required("objective.type")?;
        let objective = match obj_entry.value.as_str() {
            "absolute_deviation" => ObjectiveKind::AbsoluteDeviation,
            "l1_norm" => ObjectiveKind::L1Norm,
            "zero" => ObjectiveKind::Zero,
            other => {
                return Err(err(obj_entry.line, format!("`objective.type`: {other:?} is not absolute_deviation, l1_norm or zero")))
            }
        };
        let targets = match f.get("objective.v") {
            None if objective == ObjectiveKind::Zero => None,
            None => return Err(Error::MissingKey("objective.v".into())),
            Some(e) if e.value == "alternating" => Some(TargetSpec::Alternating),
            Some(e) if e.value.starts_with("gaussian") => {
                let (seed, variance) =
                    parse_gaussian(&e.value).ok_or_else(|| err(e.line, "`objective.v`: expected gaussian(seed, variance)"))?;
                Some(TargetSpec::Gaussian { seed, variance })
            }
            Some(_) => Some(TargetSpec::Values(f.rows("objective.v")?.expect("present"))),
        };

        let noise_entry = f.required("noise.kind")?;
        let sigma_sq = match noise_entry.value.as_str() {
            "none" => None,
            "gaussian" => Some(f.parse_required::<f64>("noise.sigma_sq")?),
            other => return Err(err(noise_entry.line, format!("`noise.kind`: {other:?} is not none or gaussian"))),
        };

        let one_time_scale = f.parse::<bool>("schedule.one_time_scale")?.unwrap_or(false);
        let alpha0 = f.parse_required("schedule.alpha0")?;
        let nu = f.parse_required("schedule.nu")?;
        let schedule = if one_time_scale {
            for key in ["schedule.beta0", "schedule.mu"] {
                if let Some(e) = f.get(key) {
                    return Err(err(e.line, format!("`{key}` conflicts with schedule.one_time_scale = true")));
                }
            }
            PowerLawSchedule { alpha0, nu, beta0: 1.0, mu: 0.0, one_time_scale: true }
        } else {
            PowerLawSchedule {
                alpha0,
                nu,
                beta0: f.parse_required("schedule.beta0")?,
                mu: f.parse_required("schedule.mu")?,
                one_time_scale: false,
            }
        };

        let cfg = Self {
            n: f.parse_required("n")?,
            d: f.parse_required("d")?,
            horizon: f.parse_required("T")?,
            seed: f.parse("seed")?,
            record_every: f.parse("record_every")?.unwrap_or(100),
            trials: f.parse("trials")?.unwrap_or(1),
            record_states: f.parse("record_states")?.unwrap_or(false),
            x0: f.rows("x0")?,
            graph,
            r,
            b: f.parse("graph.B")?,
            eta: f.parse("graph.eta")?,
            objective,
            targets,
            sigma_sq,
            schedule,
        };
        cfg.schedule.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// `--seed` beats the file, which beats the environment.
    pub fn resolve_seed(&self, cli: Option<u64>, env: Option<&str>) -> Result<u64> {
        if let Some(s) = cli.or(self.seed) {
            return Ok(s);
        }
        match env {
            Some(v) => v.trim().parse().map_err(|_| Error::InvalidParameter(format!("{SEED_ENV}={v:?} is not an integer"))),
            None => Err(Error::MissingKey("seed".into())),
        }
    }

    fn weight_vector(&self) -> Result<StochasticVector> {
        match &self.r {
            Some(r) => {
                if r.len() != self.n {
                    return Err(Error::DimensionMismatch(format!("graph.r has {} entries, n = {}", r.len(), self.n)));
                }
                StochasticVector::new(r.clone())
            }
            None => StochasticVector::uniform(self.n),
        }
    }

    fn locals(&self) -> Result<Vec<LocalObjective>> {
        let (n, d) = (self.n, self.d);
        let rows: Vec<Vec<f64>> = match &self.targets {
            None => return Ok(vec![LocalObjective::Zero; n]),
            Some(TargetSpec::Alternating) => (1..=n).map(|i| vec![2.0 * (i % 2) as f64 - 1.0; d]).collect(),
            Some(TargetSpec::Values(v)) => v.clone(),
            Some(TargetSpec::Gaussian { seed, variance }) => {
                let (w1, w2) = gaussian_targets(d, *seed, *variance)?;
                (1..=n).map(|i| if i % 2 == 1 { w1.clone() } else { w2.clone() }).collect()
            }
        };
        if rows.len() != n || rows.iter().any(|r| r.len() != d) {
            return Err(Error::DimensionMismatch(format!("objective.v must have {n} rows of {d} entries")));
        }
        Ok(rows
            .into_iter()
            .map(|v| match self.objective {
                ObjectiveKind::AbsoluteDeviation => LocalObjective::AbsoluteDeviation(v[0]),
                ObjectiveKind::L1Norm => LocalObjective::L1Norm(v),
                ObjectiveKind::Zero => LocalObjective::Zero,
            })
            .collect())
    }

    /// Builds the simulation; relative `graph.file` paths resolve against `base`.
    pub fn build(&self, base: &Path, seed: u64) -> Result<SimulationConfig> {
        let r = self.weight_vector()?;
        let mut graph = match &self.graph {
            GraphSpec::CyclicGossip => GraphSequence::cyclic_gossip(r.clone())?,
            GraphSpec::Static(rows) => {
                let n = rows.len();
                if rows.iter().any(|row| row.len() != n) {
                    return Err(Error::DimensionMismatch("graph.W must be square".into()));
                }
                let w = WeightMatrix::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))?;
                GraphSequence::constant(w, r.clone())?
            }
            GraphSpec::File(p) => GraphSequence::from_file(&base.join(p), Some(r.clone()))?,
        };
        if graph.n() != self.n {
            return Err(Error::DimensionMismatch(format!("graph has {} agents, n = {}", graph.n(), self.n)));
        }
        if self.b.is_some() || self.eta.is_some() {
            let (b, eta) = (self.b.unwrap_or(graph.b()), self.eta.unwrap_or(graph.eta()));
            graph = graph.with_declared(b, eta);
        }
        if self.objective == ObjectiveKind::AbsoluteDeviation && self.d != 1 {
            return Err(Error::DimensionMismatch("absolute_deviation needs d = 1".into()));
        }
        let objective = ObjectiveSet::new(self.locals()?, self.d, r)?;
        let noise = match self.sigma_sq {
            None => NoiseModel::none(self.d),
            Some(s) => NoiseModel::gaussian(s, self.d)?,
        };
        let mut cfg = SimulationConfig::new(graph, self.schedule, objective, noise, self.horizon)?;
        cfg.record_every = self.record_every;
        cfg.record_states = self.record_states;
        cfg.seed = seed;
        if let Some(rows) = &self.x0 {
            cfg.initial = Some(StateMatrix::from_rows(rows)?);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n = {}", self.n)?;
        writeln!(f, "d = {}", self.d)?;
        writeln!(f, "T = {}", self.horizon)?;
        if let Some(s) = self.seed {
            writeln!(f, "seed = {s}")?;
        }
        writeln!(f, "record_every = {}", self.record_every)?;
        writeln!(f, "trials = {}", self.trials)?;
        writeln!(f, "record_states = {}", self.record_states)?;
        if let Some(x0) = &self.x0 {
            writeln!(f, "x0 = {}", fmt_rows(x0))?;
        }
        match &self.graph {
            GraphSpec::CyclicGossip => writeln!(f, "graph.type = cyclic_gossip")?,
            GraphSpec::Static(w) => {
                writeln!(f, "graph.type = static")?;
                writeln!(f, "graph.W = {}", fmt_rows(w))?;
            }
            GraphSpec::File(p) => {
                writeln!(f, "graph.type = custom-from-file")?;
                writeln!(f, "graph.file = {}", p.display())?;
            }
        }
        if let Some(r) = &self.r {
            writeln!(f, "graph.r = {}", fmt_rows(std::slice::from_ref(r)))?;
        }
        if let Some(b) = self.b {
            writeln!(f, "graph.B = {b}")?;
        }
        if let Some(eta) = self.eta {
            writeln!(f, "graph.eta = {eta:?}")?;
        }
        let kind = match self.objective {
            ObjectiveKind::AbsoluteDeviation => "absolute_deviation",
            ObjectiveKind::L1Norm => "l1_norm",
            ObjectiveKind::Zero => "zero",
        };
        writeln!(f, "objective.type = {kind}")?;
        match &self.targets {
            None => {}
            Some(TargetSpec::Alternating) => writeln!(f, "objective.v = alternating")?,
            Some(TargetSpec::Values(v)) => writeln!(f, "objective.v = {}", fmt_rows(v))?,
            Some(TargetSpec::Gaussian { seed, variance }) => writeln!(f, "objective.v = gaussian({seed}, {variance:?})")?,
        }
        match self.sigma_sq {
            None => writeln!(f, "noise.kind = none")?,
            Some(s) => {
                writeln!(f, "noise.kind = gaussian")?;
                writeln!(f, "noise.sigma_sq = {s:?}")?;
            }
        }
        let s = &self.schedule;
        writeln!(f, "schedule.alpha0 = {:?}", s.alpha0)?;
        writeln!(f, "schedule.nu = {:?}", s.nu)?;
        if s.one_time_scale {
            writeln!(f, "schedule.one_time_scale = true")
        } else {
            writeln!(f, "schedule.beta0 = {:?}", s.beta0)?;
            writeln!(f, "schedule.mu = {:?}", s.mu)
        }
    }
}
