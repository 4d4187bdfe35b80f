//! The random building blocks: Latin hypercube initialization, Lévy flight
//! steps, and Cauchy draws, all from one seeded source.
//!
//! cargo run --release --example sampling

use peoa::sampling::{cauchy_draw, latin_hypercube, levy_sigma, levy_step, seeded, LevyParams};
use peoa::SearchSpace;

fn main() -> peoa::Result<()> {
    let mut rng = seeded(2024);

    let space = SearchSpace::uniform(2, 0.0, 1.0)?;
    println!("Latin hypercube, 5 points (one per row and column stratum):");
    for p in latin_hypercube(&space, 5, &mut rng) {
        println!("  ({:.3}, {:.3})", p[0], p[1]);
    }

    println!("Levy sigma for beta = 1.5: {:.12}", levy_sigma(1.5)?);
    let params = LevyParams::new(1.5)?;
    let steps: Vec<f64> = (0..10_000).map(|_| levy_step(1, &params, &mut rng)[0].abs()).collect();
    let big = steps.iter().filter(|s| **s > 0.1).count();
    println!("Levy steps: {big} of 10000 exceed 0.1 (heavy tail), largest {:.3}", steps.iter().cloned().fold(0.0, f64::max));

    let draws: Vec<f64> = (0..5).map(|_| cauchy_draw(0.5, 0.1, &mut rng)).collect();
    println!("Cauchy(0.5, 0.1) draws: {draws:.3?}");
    Ok(())
}
