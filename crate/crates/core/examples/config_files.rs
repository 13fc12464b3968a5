//! Loads a bundled experiment file, prints its canonical form and runs a
//! shortened version.

use std::path::Path;

use nco::config::ExperimentConfig;
use nco::dynamics::run;

fn main() -> nco::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/fig2_topleft.cfg").to_string());
    let path = Path::new(&path);
    let cfg = ExperimentConfig::load(path)?;
    print!("{cfg}");
    assert_eq!(ExperimentConfig::parse(&cfg.to_string())?, cfg);

    let mut sim = cfg.build(path.parent().unwrap_or(Path::new(".")), cfg.seed.unwrap_or(1))?;
    sim.horizon = 5000;
    let traj = run(&sim).map_err(nco::Error::from)?;
    let last = traj.last().unwrap();
    println!("\nafter {} steps: delta = {:.4e}, dist_opt = {:.4e}", last.t, last.delta, last.dist_opt);
    Ok(())
}
