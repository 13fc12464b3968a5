//! Mean disagreement against sqrt(beta) + alpha/beta, for the reference
//! schedule and for beta = 1.

use nco::presets;
use nco::verification::consensus_bound_envelope;

fn main() -> nco::Result<()> {
    let cps = [10, 100, 1000, 3000, 10_000, 30_000, 100_000];
    println!("two time scales (0.6, 0.77)");
    println!("{}", consensus_bound_envelope(&presets::converging()?, 100, &cps)?);
    println!("\none time scale, nu = 0.77");
    println!("{}", consensus_bound_envelope(&presets::one_time_scale(0.77)?, 100, &cps)?);
    Ok(())
}
