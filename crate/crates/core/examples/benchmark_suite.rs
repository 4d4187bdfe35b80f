//! Browse the benchmark registry by family and check every deterministic
//! function against its tabulated optimum.
//!
//! cargo run --release --example benchmark_suite

use peoa::benchmarks::{verify_suite, Benchmark, Family};
use peoa::sampling::seeded;

fn main() -> peoa::Result<()> {
    for family in [
        Family::UnimodalSeparable,
        Family::MultimodalSeparable,
        Family::UnimodalNonseparable,
        Family::MultimodalNonseparable,
    ] {
        let names: Vec<&str> = Benchmark::by_family(family).map(|b| b.spec().name).collect();
        println!("{family}: {}", names.join(", "));
    }

    let sphere = Benchmark::from_name("Sum Squares")?;
    println!("\n{} on {:?}: f(1,1,1) = {}", sphere, sphere.spec().range, sphere.evaluate(&[1.0; 3], None));

    let reports = verify_suite(&[2, 5, 10, 20], &mut seeded(1))?;
    println!("verified {} (function, dimension) pairs", reports.len());
    Ok(())
}
