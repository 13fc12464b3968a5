//! Ten-dimensional L1 problem: agent spread and distance of the mean to the
//! optimal set at each decade.
//!
//!     cargo run --release --example reproduce_fig4 -- out/fig4.csv

use nco::dynamics::run;
use nco::presets;

fn main() -> nco::Result<()> {
    let cfg = presets::l1_clusters()?;
    if let Some(path) = std::env::args().nth(1) {
        let s = nco::experiment::run_to_csv(&cfg, path.as_ref())?;
        print!("{s}");
    }
    let traj = run(&cfg).map_err(nco::Error::from)?;
    println!("{:>8} {:>12} {:>12} {:>12}", "t", "std_max", "dist_opt", "f_gap");
    for t in [100, 1000, 10_000, 100_000] {
        let r = traj.record_at(t).expect("recorded");
        println!("{:>8} {:>12.4e} {:>12.4e} {:>12.4e}", t, r.std_max, r.dist_opt, r.f_gap);
    }
    Ok(())
}
