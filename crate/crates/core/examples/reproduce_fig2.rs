//! The four scalar runs: two time scales with (mu, nu) = (0.6, 0.77) and
//! (0.2, 0.3), and beta = 1 with nu = 0.77 and 0.3. Pass a directory to also
//! write the CSVs (with per-agent states).
//!
//!     cargo run --release --example reproduce_fig2 -- out/fig2

use std::path::PathBuf;

use nco::dynamics::run;
use nco::experiment::run_to_csv;
use nco::presets;
use rayon::prelude::*;

fn main() -> nco::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from);
    let runs = vec![
        ("topleft", "two time scales (0.6, 0.77)", presets::converging()?),
        ("topright", "two time scales (0.2, 0.3)", presets::slow_exponents()?),
        ("bottomleft", "one time scale, nu = 0.77", presets::one_time_scale(0.77)?),
        ("bottomright", "one time scale, nu = 0.3", presets::one_time_scale(0.3)?),
    ];
    let rows: Vec<_> = runs
        .par_iter()
        .map(|(tag, label, cfg)| {
            if let Some(dir) = &out {
                run_to_csv(cfg, &dir.join(format!("fig2_{tag}.csv"))).expect("csv");
            }
            let traj = run(cfg).expect("finite run");
            (label, traj.window_agent_std(0.1), traj.window_mean_std(0.1), traj.max_abs_state, traj.last().unwrap().xbar[0])
        })
        .collect();
    println!("last 10% of T = {}", presets::HORIZON);
    println!("{:<30} {:>12} {:>12} {:>10} {:>10}", "run", "agent std", "std of xbar", "max |x|", "xbar(T)");
    for (label, agent, mean, max, xbar) in rows {
        println!("{label:<30} {agent:>12.4e} {mean:>12.4e} {max:>10.4} {xbar:>10.4}");
    }
    Ok(())
}
