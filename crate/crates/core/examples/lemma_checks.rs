//! The exact inequality checks over their randomized instance sets, then the
//! one-window expected contraction on the reference configuration.

use nco::presets;
use nco::verification::{check_window_contraction, deterministic_suite, recursion_family_consensus};

fn main() -> nco::Result<()> {
    let start = std::time::Instant::now();
    for rep in deterministic_suite(1)? {
        println!("{rep}");
    }
    println!("({:.2?})\n", start.elapsed());

    let fam = recursion_family_consensus(100_000)?;
    println!(
        "beta^2 family: S = {:.3}, bound holds = {}, precondition failures = {}",
        fam.s, fam.bound_holds, fam.precondition_failures
    );

    let cfg = presets::converging()?;
    for k in [100, 1000, 10_000] {
        for gamma_x in [1.0, 10.0] {
            println!("{}", check_window_contraction(&cfg, k, 1000, gamma_x)?);
        }
    }
    Ok(())
}
