//! The best eagle's territory search on its own: build a territory around a
//! point and compare the built-in local minimizers on the same budget.
//!
//! cargo run --release --example local_search

use peoa::benchmarks::Benchmark;
use peoa::local_search::{local_minimize, territory, LocalMethod};
use peoa::{Eagle, Evaluator, Objective};

fn main() -> peoa::Result<()> {
    let b = Benchmark::Rosenbrock;
    let space = b.search_space(2)?;
    let start = vec![0.6, 0.2];

    for method in [LocalMethod::NelderMead, LocalMethod::HookeJeeves, LocalMethod::Compass] {
        let mut objective = b.objective(2, 0);
        let value = objective.evaluate(&start)?;
        let best = Eagle { position: start.clone(), value };
        let terr = territory(&best, &space, 0.04);

        let mut evaluator = Evaluator::new(&mut objective, 10_000);
        let result = local_minimize(&method, &mut evaluator, &terr, value, 400)?;
        println!(
            "{method:?}: territory half-width {}, {:?} -> {:.3e} in {} evaluations",
            terr.y_size, result.best_point, result.best_value, result.evals_consumed
        );
    }
    Ok(())
}
