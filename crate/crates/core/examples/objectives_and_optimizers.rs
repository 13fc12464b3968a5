//! Local objectives, subgradients, and the box of global minimizers used for
//! the distance-to-optimum diagnostic.

use nco::{ObjectiveSet, StochasticVector};

fn main() -> nco::Result<()> {
    let r = StochasticVector::uniform(6)?;
    let scalar = ObjectiveSet::alternating_abs(r.clone())?;
    let b = scalar.optimizer_box()?;
    println!("scalar: L = {}, box = [{}, {}]", scalar.lipschitz(), b.lo[0], b.hi[0]);
    for x in [-2.0, 0.0, 0.7, 2.0] {
        println!(
            "  f({x:>4}) = {:.3}  g_1 = {:?}  dist = {:.3}",
            scalar.global_value(&[x]),
            scalar.subgradient(0, &[x]),
            scalar.distance_to_optimum(&[x])?
        );
    }

    let l1 = ObjectiveSet::two_cluster_l1(r.clone(), 10, 2, 0.1)?;
    let b = l1.optimizer_box()?;
    println!("\nL1 clusters: L = {:.4}", l1.lipschitz());
    for k in 0..10 {
        println!("  coord {k}: [{:+.4}, {:+.4}]", b.lo[k], b.hi[k]);
    }
    println!("  dist(0) = {:.4}", l1.distance_to_optimum(&[0.0; 10])?);

    let skew = StochasticVector::new(vec![0.6, 0.1, 0.1, 0.1, 0.05, 0.05])?;
    let b = ObjectiveSet::alternating_abs(skew)?.optimizer_box()?;
    println!("\nskewed weights: box = [{}, {}]", b.lo[0], b.hi[0]);
    Ok(())
}
