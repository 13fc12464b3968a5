//! Weighted mean, r-norm and disagreement, then pure averaging on the gossip
//! network driving the disagreement to zero while the weighted mean stays put.

use nco::dynamics::{run, SimulationConfig};
use nco::linalg::{deviation, r_norm, weighted_mean};
use nco::{GraphSequence, NoiseModel, ObjectiveSet, PowerLawSchedule, StateMatrix, StochasticVector};

fn main() -> nco::Result<()> {
    let r = StochasticVector::new(vec![1.0, 2.0, 3.0, 4.0])?;
    let x = StateMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 2.0], vec![-1.0, 1.0], vec![2.0, -2.0]])?;
    println!("r          = {:?}", r.entries());
    println!("||X||_r    = {:.6}", r_norm(&x, &r)?);
    println!("xbar       = {:?}", weighted_mean(&x, &r)?);
    println!("delta      = {:.6}", deviation(&x, &r)?.1);

    let mut cfg = SimulationConfig::new(
        GraphSequence::cyclic_gossip(r.clone())?,
        PowerLawSchedule::new(0.0, 0.0, 0.5, 0.0)?,
        ObjectiveSet::zero(r, 2)?,
        NoiseModel::none(2),
        200,
    )?;
    cfg.initial = Some(x);
    cfg.record_every = 25;
    let traj = run(&cfg).map_err(nco::Error::from)?;
    println!("\n{:>5} {:>12} {:>24}", "t", "delta", "xbar");
    for rec in &traj.records {
        println!("{:>5} {:>12.4e} {:>24}", rec.t, rec.delta, format!("{:.6?}", rec.xbar));
    }
    Ok(())
}
