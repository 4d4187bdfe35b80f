//! Compare territory fractions on a few functions.
//!
//! cargo run --release --example rho_sweep

use peoa::benchmarks::Benchmark;
use peoa::harness::{parse_rho_values, rho_sweep, SweepPlan};

fn main() -> peoa::Result<()> {
    let mut plan = SweepPlan::new(parse_rho_values("0.02..0.08:0.02")?, 5, 5);
    plan.base.functions = vec![Benchmark::Schwefel220, Benchmark::Salomon, Benchmark::XinSheYang4];

    let report = rho_sweep(&plan)?;
    for row in &report.rows {
        let means: Vec<String> = row.means.iter().map(|m| format!("{m:.2e}")).collect();
        println!("rho {:.2}: [{}] average {:.3e}", row.rho, means.join(", "), row.average);
    }
    if let Some(best) = report.best_row() {
        println!("best rho {}", best.rho);
    }
    Ok(())
}
