//! Repeated seeded runs with CSV reports (stats, runs, boxplot data, traces).
//!
//! cargo run --release --example experiment -- [output dir]

use std::path::PathBuf;

use peoa::benchmarks::Benchmark;
use peoa::harness::{run_experiment, ExperimentPlan};

fn main() -> peoa::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("peoa-experiment"));

    let plan = ExperimentPlan::new(
        vec![Benchmark::Sphere, Benchmark::Ackley, Benchmark::Rosenbrock],
        vec![2, 5],
    )
    .with_runs(10)
    .with_base_seed(1000);

    let (report, files) = run_experiment(&plan, &out)?;
    for s in &report.stats {
        println!(
            "{:<12} D={} mean {:.3e} std {:.3e} successes {}/{}",
            s.function.spec().id, s.dimension, s.mean, s.std, s.successes, s.runs
        );
    }
    println!("reports in {}", files.stats.parent().unwrap().display());
    Ok(())
}
