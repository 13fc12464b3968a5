//! CSV output, run summaries and `(mu, nu)` sweeps.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::dynamics::{self, Aborted, DiagnosticsRecord, SimulationConfig, Trajectory};
use crate::error::{Error, Result};
use crate::schedules::{classify_region, default_constants, validate_assumption4, Assumption4Report, PowerLawSchedule, Region};

pub const CSV_COLUMNS: [&str; 7] = ["t", "delta", "std_max", "xbar_norm", "f_gap", "dist_opt", "sum_alpha_delta"];

fn io(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

pub fn csv_header(n: usize, d: usize, states: bool) -> String {
    let mut cols: Vec<String> = CSV_COLUMNS.iter().map(|s| s.to_string()).collect();
    if states {
        for i in 1..=n {
            for k in 1..=d {
                cols.push(format!("x_{i}_{k}"));
            }
        }
    }
    cols.join(",")
}

/// One CSV row; floats use the shortest representation that parses back exactly.
pub fn csv_row(r: &DiagnosticsRecord) -> String {
    let mut s = format!(
        "{},{:?},{:?},{:?},{:?},{:?},{:?}",
        r.t, r.delta, r.std_max, r.xbar_norm, r.f_gap, r.dist_opt, r.sum_alpha_delta
    );
    if let Some(x) = &r.states {
        for v in x {
            s.push(',');
            s.push_str(&format!("{v:?}"));
        }
    }
    s
}

/// Writes the header, every record, and for aborted runs a final
/// `# aborted at t=...` line.
pub fn write_csv<W: Write>(mut w: W, traj: &Trajectory, states: bool, aborted_at: Option<usize>) -> std::io::Result<()> {
    writeln!(w, "{}", csv_header(traj.n, traj.d, states))?;
    for r in &traj.records {
        writeln!(w, "{}", csv_row(r))?;
    }
    if let Some(t) = aborted_at {
        writeln!(w, "# aborted at t={t}")?;
    }
    w.flush()
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub horizon: usize,
    pub final_record: Option<DiagnosticsRecord>,
    pub max_abs_state: f64,
    pub region: Region,
    /// `None` when `lambda` is unavailable or the schedule is not validated
    /// (one-time-scale runs).
    pub assumption4: Option<Assumption4Report>,
    pub aborted_at: Option<usize>,
    pub abort_reason: Option<String>,
}

impl RunSummary {
    pub fn ok(&self) -> bool {
        self.aborted_at.is_none()
    }
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(t) = self.aborted_at {
            writeln!(f, "aborted at t={t}: {}", self.abort_reason.as_deref().unwrap_or(""))?;
        }
        if let Some(r) = &self.final_record {
            writeln!(f, "final t          {}", r.t)?;
            writeln!(f, "final delta      {:.6e}", r.delta)?;
            writeln!(f, "final std_max    {:.6e}", r.std_max)?;
            writeln!(f, "final dist_opt   {:.6e}", r.dist_opt)?;
            writeln!(f, "final f_gap      {:.6e}", r.f_gap)?;
        }
        writeln!(f, "max |x|          {:.6e}", self.max_abs_state)?;
        writeln!(f, "region           {}", self.region)?;
        match &self.assumption4 {
            Some(rep) => {
                for (name, v) in rep.verdicts() {
                    writeln!(f, "step-size {:<24} {}", name, if v.pass { "ok" } else { "warn" })?;
                }
                Ok(())
            }
            None => writeln!(f, "step-size checks skipped"),
        }
    }
}

fn schedule_checks(cfg: &SimulationConfig) -> (Region, Option<Assumption4Report>) {
    let s = &cfg.schedule;
    let region = classify_region(s.mu, s.nu, s.beta0);
    let report = if s.one_time_scale {
        None
    } else {
        cfg.graph.lambda().ok().and_then(|lambda| {
            let (c1, c2) = default_constants(lambda);
            validate_assumption4(s, lambda, c1, c2).ok()
        })
    };
    (region, report)
}

/// Runs `cfg` and writes its CSV to `out`. An aborted run still writes the
/// partial CSV; the summary carries the abort.
pub fn run_to_csv(cfg: &SimulationConfig, out: &Path) -> Result<RunSummary> {
    let (traj, abort) = match dynamics::run(cfg) {
        Ok(t) => (t, None),
        Err(Aborted { partial, t, reason }) => (partial, Some((t, reason))),
    };
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| io(parent, e))?;
    }
    let file = File::create(out).map_err(|e| io(out, e))?;
    write_csv(BufWriter::new(file), &traj, cfg.record_states, abort.as_ref().map(|a| a.0)).map_err(|e| io(out, e))?;
    let (region, assumption4) = schedule_checks(cfg);
    Ok(RunSummary {
        horizon: cfg.horizon,
        final_record: traj.records.last().cloned(),
        max_abs_state: traj.max_abs_state,
        region,
        assumption4,
        aborted_at: abort.as_ref().map(|a| a.0),
        abort_reason: abort.map(|a| a.1),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub mu: f64,
    pub nu: f64,
    pub in_r1: bool,
    pub final_delta: f64,
    pub final_dist: f64,
    pub csv: PathBuf,
    pub error: Option<String>,
}

pub fn cell_file_name(mu: f64, nu: f64) -> String {
    format!("mu{mu:?}_nu{nu:?}.csv")
}

/// Runs `base` once per `(mu, nu)` cell in parallel, writing
/// `mu<mu>_nu<nu>.csv` per cell and `summary.csv`. Failed cells are recorded
/// and the sweep continues.
pub fn sweep(base: &SimulationConfig, grid: &[(f64, f64)], out_dir: &Path) -> Result<Vec<SweepCell>> {
    std::fs::create_dir_all(out_dir).map_err(|e| io(out_dir, e))?;
    let cells: Vec<SweepCell> = grid
        .par_iter()
        .map(|&(mu, nu)| {
            let csv = out_dir.join(cell_file_name(mu, nu));
            let in_r1 = classify_region(mu, nu, base.schedule.beta0).is_in_r1();
            let mut cell = SweepCell { mu, nu, in_r1, final_delta: f64::NAN, final_dist: f64::NAN, csv: csv.clone(), error: None };
            let schedule = PowerLawSchedule { mu, nu, one_time_scale: false, ..base.schedule };
            if let Err(e) = schedule.validate() {
                cell.error = Some(e.to_string());
                return cell;
            }
            let cfg = SimulationConfig { schedule, ..base.clone() };
            match run_to_csv(&cfg, &csv) {
                Ok(s) => {
                    if let Some(r) = &s.final_record {
                        cell.final_delta = r.delta;
                        cell.final_dist = r.dist_opt;
                    }
                    if let Some(t) = s.aborted_at {
                        cell.error = Some(format!("aborted at t={t}"));
                    }
                }
                Err(e) => cell.error = Some(e.to_string()),
            }
            cell
        })
        .collect();
    let path = out_dir.join("summary.csv");
    let mut w = BufWriter::new(File::create(&path).map_err(|e| io(&path, e))?);
    let write = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(w, "mu,nu,in_r1,final_delta,final_dist")?;
        for c in &cells {
            writeln!(w, "{:?},{:?},{},{:?},{:?}", c.mu, c.nu, c.in_r1, c.final_delta, c.final_dist)?;
        }
        w.flush()
    };
    write(&mut w).map_err(|e| io(&path, e))?;
    Ok(cells)
}

/// Cartesian product of the two lists.
pub fn grid(mus: &[f64], nus: &[f64]) -> Vec<(f64, f64)> {
    mus.iter().flat_map(|&m| nus.iter().map(move |&n| (m, n))).collect()
}
