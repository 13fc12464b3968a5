//! Step-size checks for the reference schedule and a schedule inside the
//! convergence region, plus partial sums and the power-sum bound.

use nco::schedules::{default_constants, partial_sums_series, sum_power_bound, validate_assumption4};
use nco::PowerLawSchedule;

fn main() -> nco::Result<()> {
    let lambda = 1.0 / 4320.0;
    let (c1, c2) = default_constants(lambda);
    for s in [PowerLawSchedule::new(0.0055, 0.77, 0.21, 0.6)?, PowerLawSchedule::new(0.0055, 0.95, 0.5, 0.75)?] {
        let rep = validate_assumption4(&s, lambda, c1, c2)?;
        println!("{rep}\n");
    }

    let s = PowerLawSchedule::new(0.0055, 0.77, 0.21, 0.6)?;
    println!("{:>8} {:>10} {:>10} {:>10} {:>12}", "T", "sum a", "sum a^2", "sum b^2", "sum a^2/b");
    for p in partial_sums_series(&s, &[10, 100, 1000, 10_000, 100_000]) {
        println!("{:>8} {:>10.5} {:>10.3e} {:>10.5} {:>12.4e}", p.horizon, p.alpha, p.alpha_sq, p.beta_sq, p.alpha_sq_over_beta);
    }

    println!();
    for (delta, tau, t) in [(-2.0, 2.0, 1000), (-1.0, 1.0, 100), (-0.6, 0.0, 1000), (0.5, 3.0, 50)] {
        let direct: f64 = (1..=t).map(|k| (k as f64 + tau).powf(delta)).sum();
        println!("sum_(t<={t}) (t+{tau})^{delta} = {direct:.6} <= {:.6}", sum_power_bound(delta, tau, t)?);
    }
    Ok(())
}
