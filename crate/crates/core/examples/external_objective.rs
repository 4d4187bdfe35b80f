//! Optimize a function that lives in another process. The example re-runs
//! itself as the child, which answers one line of coordinates with one line
//! holding the value.
//!
//! cargo run --release --example external_objective

use std::io;

use peoa::harness::{serve, ExternalObjective};
use peoa::{FnObjective, OptimizerConfig, SearchSpace};

fn booth(x: &[f64]) -> f64 {
    (x[0] + 2.0 * x[1] - 7.0).powi(2) + (2.0 * x[0] + x[1] - 5.0).powi(2)
}

fn main() -> peoa::Result<()> {
    if std::env::args().nth(1).as_deref() == Some("--serve") {
        let mut objective = FnObjective::new(booth);
        return serve(&mut objective, io::stdin().lock(), io::stdout().lock());
    }

    let exe = std::env::current_exe().expect("path of this example");
    let command = format!("'{}' --serve", exe.display());
    let mut child = ExternalObjective::spawn(&command)?.with_optimum(0.0);

    let space = SearchSpace::uniform(2, -10.0, 10.0)?;
    let config = OptimizerConfig::for_dimension(2).with_seed(3);
    let record = peoa::run(&mut child, &space, &config)?;
    println!(
        "minimum near (1, 3): {:?} -> {:e} after {} evaluations",
        record.best_position, record.best_value, record.evals_used
    );
    Ok(())
}
