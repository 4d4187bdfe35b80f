//! Minimize your own function over your own box, tune the optimizer, and
//! inspect the per-generation log.
//!
//! cargo run --release --example custom_objective

use peoa::{FnObjective, Optimizer, OptimizerConfig, SearchSpace};

fn main() -> peoa::Result<()> {
    // A shifted, coupled quadratic valley with its minimum 0.5 at (1, -2, 3).
    let target = [1.0, -2.0, 3.0];
    let mut valley = FnObjective::new(move |x: &[f64]| {
        let d: Vec<f64> = x.iter().zip(&target).map(|(a, b)| a - b).collect();
        0.5 + d[0].powi(2) + 10.0 * (d[1] + 0.5 * d[0]).powi(2) + 100.0 * d[2].powi(2)
    })
    // Declaring the optimum lets the run stop once it is within tolerance.
    .with_optimum(0.5);

    let space = SearchSpace::new(vec![-10.0, -10.0, 0.0], vec![10.0, 10.0, 5.0])?;
    let mut config = OptimizerConfig::for_dimension(3)
        .with_seed(7)
        .with_max_evals(20_000)
        .with_tolerance(1e-10);
    config.local_method = peoa::local_search::LocalMethod::HookeJeeves;

    let optimizer = Optimizer::new(config)?;
    let record = optimizer.run(&mut valley, &space)?;

    println!("best {:?} -> {:e}", record.best_position, record.best_value);
    println!(" gen   evals  size  local  P(move, mut1, mut2)");
    for g in record.generation_log.iter().take(10) {
        println!(
            "{:>4} {:>7} {:>5} {:>6}  [{:.2}, {:.2}, {:.2}]",
            g.generation, g.evals_at_start, g.population_size, g.local_evals,
            g.probabilities[0], g.probabilities[1], g.probabilities[2]
        );
    }
    Ok(())
}
