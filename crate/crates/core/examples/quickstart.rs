//! Minimize a built-in benchmark with the default settings.
//!
//! cargo run --release --example quickstart

use peoa::benchmarks;
use peoa::OptimizerConfig;

fn main() -> peoa::Result<()> {
    let (mut rastrigin, space) = benchmarks::make("rastrigin", 5)?;
    let config = OptimizerConfig::for_dimension(5).with_seed(42);

    let record = peoa::run(&mut rastrigin, &space, &config)?;

    println!("best value    {:e}", record.best_value);
    println!("best position {:?}", record.best_position);
    println!("evaluations   {} of {}", record.evals_used, config.max_evals);
    println!("generations   {}", record.generations);
    println!("stopped by    {}", record.terminated_by.as_str());
    Ok(())
}
