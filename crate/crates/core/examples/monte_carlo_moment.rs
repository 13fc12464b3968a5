//! Communication noise: seeded draws and the second moment of the weighted
//! mean, Monte Carlo against the exact recursion.

use nco::dynamics::run_mean_second_moment;
use nco::noise::{mean_noise_second_moment, sample_noise_matrix, SeededStream};
use nco::{presets, NoiseModel, StochasticVector};

fn main() -> nco::Result<()> {
    let m = NoiseModel::gaussian(0.1, 2)?;
    let e = sample_noise_matrix(&m, &SeededStream::new(7), 0, 1, 3)?;
    println!("E(1) for seed 7, trial 0:\n{}", e.as_matrix());
    let r = StochasticVector::uniform(6)?;
    println!("E||r^T E||^2 = {:.6} (gamma = {})", mean_noise_second_moment(&NoiseModel::gaussian(0.1, 1)?, &r)?, 0.1);

    let mut cfg = presets::noise_only(1)?;
    cfg.horizon = 200;
    let start = std::time::Instant::now();
    let pts = run_mean_second_moment(&cfg, 10_000, &[2, 10, 50, 100, 200])?;
    println!("\n{:>5} {:>12} {:>10} {:>12} {:>8}", "t", "MC", "se", "exact", "rel err");
    for p in pts {
        println!("{:>5} {:>12.5e} {:>10.2e} {:>12.5e} {:>8.4}", p.t, p.mc, p.std_err, p.exact, (p.mc - p.exact).abs() / p.exact);
    }
    println!("10^4 trials in {:.2?}", start.elapsed());
    Ok(())
}
