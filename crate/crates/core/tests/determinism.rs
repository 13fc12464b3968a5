use nco::dynamics::run;
use nco::experiment::write_csv;
use nco::presets;

fn csv(cfg: &nco::SimulationConfig) -> Vec<u8> {
    let traj = run(cfg).unwrap();
    let mut buf = Vec::new();
    write_csv(&mut buf, &traj, cfg.record_states, None).unwrap();
    buf
}

#[test]
fn same_seed_same_bytes() {
    let mut cfg = presets::converging().unwrap();
    cfg.horizon = 5000;
    assert_eq!(csv(&cfg), csv(&cfg));
    let mut other = cfg.clone();
    other.seed = 2;
    assert_ne!(csv(&cfg), csv(&other));
}

#[test]
fn trials_are_independent_of_execution_order() {
    use rayon::prelude::*;
    let mut cfg = presets::noise_only(2).unwrap();
    cfg.horizon = 300;
    let serial: Vec<Vec<u8>> = (0..8)
        .map(|trial| {
            let mut c = cfg.clone();
            c.trial = trial;
            csv(&c)
        })
        .collect();
    let order: Vec<u64> = (0..8).rev().collect();
    let mut parallel: Vec<(u64, Vec<u8>)> = order
        .par_iter()
        .map(|&trial| {
            let mut c = cfg.clone();
            c.trial = trial;
            (trial, csv(&c))
        })
        .collect();
    parallel.sort_by_key(|p| p.0);
    let parallel: Vec<Vec<u8>> = parallel.into_iter().map(|p| p.1).collect();
    assert_eq!(serial, parallel);
}
