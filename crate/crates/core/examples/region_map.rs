//! Text map of the convergence region over (mu, nu) for beta0 <= 1.

use nco::schedules::classify_region;

fn main() {
    let steps = 40;
    println!("nu ^   '#' = in region, '.' = outside   (beta0 = 0.21)");
    for j in (0..=steps).rev() {
        let nu = j as f64 / steps as f64;
        let row: String = (0..=steps)
            .map(|i| if classify_region(i as f64 / steps as f64, nu, 0.21).is_in_r1() { '#' } else { '.' })
            .collect();
        println!("{nu:>5.3} {row}");
    }
    println!("      mu -> 0 .. 1");
    for (mu, nu) in [(0.75, 1.0), (0.6, 0.77), (0.2, 0.3), (1.0, 1.0)] {
        println!("({mu}, {nu}) -> {}", classify_region(mu, nu, 0.21));
    }
}
