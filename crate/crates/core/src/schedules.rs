//! Power-law step sizes `alpha(t) = alpha0 / t^nu` and `beta(t) = beta0 / t^mu`,
//! analytic validation of the step-size conditions, and the convergence
//! region classifier.
//!
//! Series conditions are decided analytically: `sum t^-p` converges iff
//! `p > 1`. Truncated sums are only used as diagnostics ([`partial_sums`]).

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawSchedule {
    pub alpha0: f64,
    pub nu: f64,
    pub beta0: f64,
    pub mu: f64,
    /// Forces `beta(t) = 1` for every `t`.
    pub one_time_scale: bool,
}

impl PowerLawSchedule {
    pub fn new(alpha0: f64, nu: f64, beta0: f64, mu: f64) -> Result<Self> {
        let s = Self { alpha0, nu, beta0, mu, one_time_scale: false };
        s.validate()?;
        Ok(s)
    }

    /// `beta(t) = 1`, `alpha(t) = alpha0 / t^nu`.
    pub fn one_time_scale(alpha0: f64, nu: f64) -> Result<Self> {
        let s = Self { alpha0, nu, beta0: 1.0, mu: 0.0, one_time_scale: true };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.alpha0, self.nu, self.beta0, self.mu].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("schedule parameters must be finite".into()));
        }
        if self.alpha0 < 0.0 {
            return Err(Error::InvalidParameter(format!("alpha0 = {} must be >= 0", self.alpha0)));
        }
        if self.nu < 0.0 || self.mu < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "exponents must be >= 0 (nu = {}, mu = {})",
                self.nu, self.mu
            )));
        }
        if !self.one_time_scale && !(self.beta0 > 0.0 && self.beta0 <= 1.0) {
            return Err(Error::InvalidParameter(format!("beta0 = {} must lie in (0, 1]", self.beta0)));
        }
        Ok(())
    }

    /// `(alpha(t), beta(t))` for `t >= 1`.
    pub fn eval(&self, t: usize) -> Result<(f64, f64)> {
        if t < 1 {
            return Err(Error::InvalidParameter("step index t must be >= 1".into()));
        }
        Ok((self.alpha(t), self.beta(t)))
    }

    pub fn alpha(&self, t: usize) -> f64 {
        self.alpha0 * (t as f64).powf(-self.nu)
    }

    pub fn beta(&self, t: usize) -> f64 {
        if self.one_time_scale {
            1.0
        } else {
            self.beta0 * (t as f64).powf(-self.mu)
        }
    }

    /// Effective `(beta0, mu)`; the one-time-scale variant is `(1, 0)`.
    fn beta_params(&self) -> (f64, f64) {
        if self.one_time_scale {
            (1.0, 0.0)
        } else {
            (self.beta0, self.mu)
        }
    }

    /// `-Delta beta(t) = beta(t) - beta(t+1)`, without cancellation for large `t`.
    pub fn neg_delta_beta(&self, t: usize) -> f64 {
        let (b0, mu) = self.beta_params();
        b0 * neg_delta_power(t, mu)
    }

    /// `-Delta alpha(t) = alpha(t) - alpha(t+1)`.
    pub fn neg_delta_alpha(&self, t: usize) -> f64 {
        self.alpha0 * neg_delta_power(t, self.nu)
    }
}

/// `t^-p - (t+1)^-p`, computed as `t^-p * (1 - (1 + 1/t)^-p)`.
fn neg_delta_power(t: usize, p: f64) -> f64 {
    let t = t as f64;
    let ratio = -(-p * (1.0 / t).ln_1p()).exp_m1();
    t.powf(-p) * ratio
}

/// Pass/fail with the reason it was decided that way.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub pass: bool,
    pub note: String,
}

impl Verdict {
    fn new(pass: bool, note: impl Into<String>) -> Self {
        Self { pass, note: note.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assumption4Report {
    pub schedule: PowerLawSchedule,
    pub lambda: f64,
    pub c1: f64,
    pub c2: f64,
    /// (a) `sum alpha = inf`
    pub alpha_diverges: Verdict,
    /// (b) `sum alpha^2 < inf` and `sum beta^2 < inf`
    pub squares_summable: Verdict,
    /// (c) `sum alpha^2 / beta < inf`
    pub ratio_summable: Verdict,
    /// (d) `-Delta beta <= c1 beta^2` for `t >= t1`
    pub beta_decrement: Verdict,
    /// (e) `-Delta alpha <= c2 alpha beta` for `t >= t2`
    pub alpha_decrement: Verdict,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    pub t0: Option<f64>,
}

impl Assumption4Report {
    pub fn all_pass(&self) -> bool {
        self.verdicts().iter().all(|(_, v)| v.pass)
    }

    pub fn verdicts(&self) -> [(&'static str, &Verdict); 5] {
        [
            ("a", &self.alpha_diverges),
            ("b", &self.squares_summable),
            ("c", &self.ratio_summable),
            ("d", &self.beta_decrement),
            ("e", &self.alpha_decrement),
        ]
    }

    /// Machine-readable `key=value` lines.
    pub fn key_values(&self) -> Vec<(String, String)> {
        let s = &self.schedule;
        let opt = |v: Option<f64>| v.map_or_else(|| "none".to_string(), |x| format!("{x:?}"));
        let mut kv = vec![
            ("alpha0".to_string(), format!("{:?}", s.alpha0)),
            ("nu".to_string(), format!("{:?}", s.nu)),
            ("beta0".to_string(), format!("{:?}", s.beta0)),
            ("mu".to_string(), format!("{:?}", s.mu)),
            ("one_time_scale".to_string(), s.one_time_scale.to_string()),
            ("lambda".to_string(), format!("{:?}", self.lambda)),
            ("c1".to_string(), format!("{:?}", self.c1)),
            ("c2".to_string(), format!("{:?}", self.c2)),
        ];
        for (name, v) in self.verdicts() {
            kv.push((format!("cond_{name}"), if v.pass { "pass" } else { "fail" }.to_string()));
        }
        kv.push(("t1".to_string(), opt(self.t1)));
        kv.push(("t2".to_string(), opt(self.t2)));
        kv.push(("t0".to_string(), opt(self.t0)));
        kv.push(("all_pass".to_string(), self.all_pass().to_string()));
        kv
    }
}

impl fmt::Display for Assumption4Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = &self.schedule;
        writeln!(
            f,
            "schedule      alpha0={} nu={} beta0={} mu={} one_time_scale={}",
            s.alpha0, s.nu, s.beta0, s.mu, s.one_time_scale
        )?;
        writeln!(f, "constants     lambda={:.6e} c1={:.6e} c2={:.6e}", self.lambda, self.c1, self.c2)?;
        let labels = [
            "(a) sum alpha = inf",
            "(b) sum alpha^2, beta^2 < inf",
            "(c) sum alpha^2/beta < inf",
            "(d) -dbeta <= c1 beta^2",
            "(e) -dalpha <= c2 alpha beta",
        ];
        for (label, (_, v)) in labels.iter().zip(self.verdicts()) {
            writeln!(f, "{label:<32} {:<4}  {}", if v.pass { "PASS" } else { "FAIL" }, v.note)?;
        }
        let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.6e}"));
        write!(f, "thresholds    t1={} t2={} t0={}", opt(self.t1), opt(self.t2), opt(self.t0))
    }
}

/// Default `c1 = 0.49 lambda`, `c2 = 0.24 lambda`.
pub fn default_constants(lambda: f64) -> (f64, f64) {
    (0.49 * lambda, 0.24 * lambda)
}

/// Decides the step-size conditions (a)-(e) analytically for a power-law
/// schedule. `c1` must lie in `(0, lambda/2)` and `c2` in `(0, lambda/4)`.
pub fn validate_assumption4(
    s: &PowerLawSchedule,
    lambda: f64,
    c1: f64,
    c2: f64,
) -> Result<Assumption4Report> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} must lie in (0, 1)")));
    }
    if !(c1 > 0.0 && c1 < lambda / 2.0) {
        return Err(Error::InvalidParameter(format!("c1 = {c1} must lie in (0, lambda/2)")));
    }
    if !(c2 > 0.0 && c2 < lambda / 4.0) {
        return Err(Error::InvalidParameter(format!("c2 = {c2} must lie in (0, lambda/4)")));
    }
    s.validate()?;
    let nu = s.nu;
    let (beta0, mu) = s.beta_params();

    let alpha_zero = s.alpha0 == 0.0;
    let alpha_diverges = if alpha_zero {
        Verdict::new(false, "alpha0 = 0")
    } else {
        Verdict::new(nu <= 1.0, format!("nu = {nu} {} 1", if nu <= 1.0 { "<=" } else { ">" }))
    };

    let a2 = alpha_zero || 2.0 * nu > 1.0;
    let b2 = 2.0 * mu > 1.0;
    let squares_summable = Verdict::new(
        a2 && b2,
        format!("2nu = {:.4} {} 1, 2mu = {:.4} {} 1", 2.0 * nu, cmp(2.0 * nu), 2.0 * mu, cmp(2.0 * mu)),
    );

    let ratio_exp = 2.0 * nu - mu;
    let ratio_summable = Verdict::new(
        alpha_zero || ratio_exp > 1.0,
        format!("2nu - mu = {ratio_exp:.4} {} 1", cmp(ratio_exp)),
    );

    // (d): beta0 mu t^-(mu+1) <= c1 beta0^2 t^-2mu  <=>  t^(1-mu) >= mu / (beta0 c1)
    let (beta_decrement, t1) = if mu == 0.0 {
        (Verdict::new(true, "beta constant"), Some(1.0))
    } else if mu < 1.0 {
        let t1 = (mu / (beta0 * c1)).powf(1.0 / (1.0 - mu)).max(1.0);
        (Verdict::new(true, format!("holds for t >= t1 = {t1:.6e}")), Some(t1))
    } else if mu == 1.0 {
        let ok = c1 * beta0 >= 1.0;
        (
            Verdict::new(
                ok,
                format!(
                    "mu = 1: needs c1*beta0 >= 1 (got {:.3e}); permitted by the region statement, unsupported by the threshold construction",
                    c1 * beta0
                ),
            ),
            if ok { Some(1.0) } else { None },
        )
    } else {
        (Verdict::new(false, "mu > 1: c1 beta^2 decays faster than -Delta beta"), None)
    };

    // (e): alpha0 nu t^-(nu+1) <= c2 alpha0 beta0 t^-(nu+mu)  <=>  t^(1-mu) >= nu / (beta0 c2)
    let (alpha_decrement, t2) = if alpha_zero || nu == 0.0 {
        (Verdict::new(true, "alpha constant"), Some(1.0))
    } else if mu < 1.0 {
        let t2 = (nu / (beta0 * c2)).powf(1.0 / (1.0 - mu)).max(1.0);
        (Verdict::new(true, format!("holds for t >= t2 = {t2:.6e}")), Some(t2))
    } else if mu == 1.0 {
        let ok = c2 * beta0 >= nu;
        (
            Verdict::new(ok, format!("mu = 1: needs c2*beta0 >= nu (got {:.3e})", c2 * beta0)),
            if ok { Some(1.0) } else { None },
        )
    } else {
        (Verdict::new(false, "mu > 1: c2 alpha beta decays faster than -Delta alpha"), None)
    };

    let t0 = match (t1, t2) {
        (Some(a), Some(b)) => Some(a.max(b)),
        _ => None,
    };

    Ok(Assumption4Report {
        schedule: *s,
        lambda,
        c1,
        c2,
        alpha_diverges,
        squares_summable,
        ratio_summable,
        beta_decrement,
        alpha_decrement,
        t1,
        t2,
        t0,
    })
}

fn cmp(v: f64) -> &'static str {
    if v > 1.0 {
        ">"
    } else {
        "<="
    }
}

/// A violated inequality of the almost-sure convergence region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionViolation {
    Beta0AboveOne,
    MuAtMostHalf,
    MuAboveOne,
    NuAtMostHalfOnePlusMu,
    NuAboveOne,
}

impl fmt::Display for RegionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Beta0AboveOne => "beta0 > 1",
            Self::MuAtMostHalf => "mu <= 1/2",
            Self::MuAboveOne => "mu > 1",
            Self::NuAtMostHalfOnePlusMu => "nu <= (1+mu)/2",
            Self::NuAboveOne => "nu > 1",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Region {
    InR1,
    Outside(Vec<RegionViolation>),
}

impl Region {
    pub fn is_in_r1(&self) -> bool {
        matches!(self, Region::InR1)
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::InR1 => f.write_str("InR1"),
            Region::Outside(v) => {
                let reasons: Vec<String> = v.iter().map(ToString::to_string).collect();
                write!(f, "Outside({})", reasons.join(", "))
            }
        }
    }
}

/// `InR1` iff `beta0 <= 1`, `1/2 < mu <= 1` and `(1+mu)/2 < nu <= 1`.
pub fn classify_region(mu: f64, nu: f64, beta0: f64) -> Region {
    let mut v = Vec::new();
    if beta0 > 1.0 {
        v.push(RegionViolation::Beta0AboveOne);
    }
    if mu <= 0.5 {
        v.push(RegionViolation::MuAtMostHalf);
    }
    if mu > 1.0 {
        v.push(RegionViolation::MuAboveOne);
    }
    if nu <= 0.5 * (1.0 + mu) {
        v.push(RegionViolation::NuAtMostHalfOnePlusMu);
    }
    if nu > 1.0 {
        v.push(RegionViolation::NuAboveOne);
    }
    if v.is_empty() {
        Region::InR1
    } else {
        Region::Outside(v)
    }
}

/// Upper bound on `sum_{t=1}^T (t + tau)^delta`.
pub fn sum_power_bound(delta: f64, tau: f64, big_t: usize) -> Result<f64> {
    if !(tau >= 0.0) || !delta.is_finite() || !tau.is_finite() {
        return Err(Error::InvalidParameter(format!("need finite delta and tau >= 0 (delta={delta}, tau={tau})")));
    }
    if big_t < 1 {
        return Err(Error::InvalidParameter("T must be >= 1".into()));
    }
    let t = big_t as f64;
    if delta < -1.0 {
        if tau == 0.0 {
            return Err(Error::InvalidParameter("bound undefined for delta < -1 with tau = 0".into()));
        }
        Ok(tau.powf(1.0 + delta) / (1.0 + delta).abs())
    } else if delta == -1.0 {
        Ok((t / tau + 1.0).ln())
    } else {
        Ok(2f64.powf(1.0 + delta) / (1.0 + delta) * (t + tau).powf(1.0 + delta))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialSums {
    pub horizon: usize,
    pub alpha: f64,
    pub alpha_sq: f64,
    pub beta_sq: f64,
    pub alpha_sq_over_beta: f64,
    pub alpha_sqrt_beta: f64,
}

impl PartialSums {
    /// `sum alpha sqrt(beta) <= sqrt(sum alpha^2/beta) * sqrt(sum beta^2)`
    pub fn cauchy_schwarz_slack(&self) -> f64 {
        self.alpha_sqrt_beta - (self.alpha_sq_over_beta * self.beta_sq).sqrt()
    }
}

/// Exact partial sums up to `T`.
pub fn partial_sums(s: &PowerLawSchedule, big_t: usize) -> PartialSums {
    partial_sums_series(s, &[big_t]).pop().unwrap_or(PartialSums {
        horizon: 0,
        alpha: 0.0,
        alpha_sq: 0.0,
        beta_sq: 0.0,
        alpha_sq_over_beta: 0.0,
        alpha_sqrt_beta: 0.0,
    })
}

/// Partial sums evaluated at each horizon in `checkpoints` (ascending) in one pass.
pub fn partial_sums_series(s: &PowerLawSchedule, checkpoints: &[usize]) -> Vec<PartialSums> {
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut acc = PartialSums {
        horizon: 0,
        alpha: 0.0,
        alpha_sq: 0.0,
        beta_sq: 0.0,
        alpha_sq_over_beta: 0.0,
        alpha_sqrt_beta: 0.0,
    };
    let mut next = checkpoints.iter().copied().filter(|&c| c >= 1).peekable();
    let last = checkpoints.iter().copied().max().unwrap_or(0);
    for t in 1..=last {
        let a = s.alpha(t);
        let b = s.beta(t);
        acc.alpha += a;
        acc.alpha_sq += a * a;
        acc.beta_sq += b * b;
        acc.alpha_sq_over_beta += a * a / b;
        acc.alpha_sqrt_beta += a * b.sqrt();
        acc.horizon = t;
        while next.peek() == Some(&t) {
            out.push(acc);
            next.next();
        }
    }
    out
}
