//! Sweep of (mu, nu) around the reference run, one CSV per cell plus
//! summary.csv in the given directory (a temporary one by default).

use std::path::PathBuf;

use nco::experiment::{grid, sweep};
use nco::presets;

fn main() -> nco::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("nco-sweep"));
    let mut base = presets::converging()?;
    base.horizon = 20_000;
    base.record_states = false;
    let cells = sweep(&base, &grid(&[0.2, 0.6, 0.7, 0.75, 0.8], &[0.3, 0.77, 0.95, 1.0]), &dir)?;
    println!("{:>5} {:>5} {:>6} {:>12} {:>12}", "mu", "nu", "in R1", "final delta", "final dist");
    for c in cells {
        println!("{:>5} {:>5} {:>6} {:>12.4e} {:>12.4e}", c.mu, c.nu, c.in_r1, c.final_delta, c.final_dist);
    }
    println!("written to {}", dir.display());
    Ok(())
}
