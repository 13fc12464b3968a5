//! The cyclic gossip network: weight matrices, their validation, the detected
//! connectivity window B, the contraction constant lambda, and the transition
//! product converging to 1 r^T.

use nco::network::{cyclic_gossip, detect_b, transition_product, validate_weight_matrix};
use nco::{GraphSequence, PowerLawSchedule, StochasticVector};

fn main() -> nco::Result<()> {
    let r = StochasticVector::uniform(6)?;
    for t in 1..=3 {
        let w = cyclic_gossip(6, &r, t)?;
        println!("W({t}) edges (j -> i): {:?}", w.edges());
        let rep = validate_weight_matrix(w.as_matrix(), &r, 0.5);
        println!("{rep}");
    }

    let g = GraphSequence::cyclic_gossip(r)?;
    println!("declared B = {}, eta = {}, lambda = {:.6e} (1/{:.0})", g.b(), g.eta(), g.lambda()?, 1.0 / g.lambda()?);
    println!("detected B over 60 steps = {:?}", detect_b(&g, 60));

    let s = PowerLawSchedule::new(0.0, 0.0, 1.0, 0.0)?;
    for t in [7, 31, 301] {
        let phi = transition_product(&g, &s, t, 1)?;
        let gap = phi.map(|v| (v - 1.0 / 6.0).abs()).max();
        println!("max |Phi({t}:1) - 1r^T| = {gap:.3e}");
    }
    Ok(())
}
