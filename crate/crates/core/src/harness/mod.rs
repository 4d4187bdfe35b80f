//! Experiment runner: repeated seeded runs over the benchmark suite with CSV
//! reports, territory-fraction sweeps, flat configuration files, and a
//! line-protocol bridge to objectives living in another process.
//!
//! Run `r` of an experiment uses seed `base_seed + r`, so any single row of
//! `runs.csv` can be replayed on its own.

mod config;
mod experiment;
mod external;
mod stats;
mod sweep;

pub use config::{config_args, parse_config, read_config};
pub use experiment::{
    execute, run_experiment, write_report, ExperimentPlan, ExperimentReport, OutputFiles, RunRow,
    DEFAULT_RUNS, OUTPUT_DIR_ENV,
};
pub use external::{serve, ExternalObjective, DEFAULT_TIMEOUT};
pub use stats::{aggregate, floor_for_boxplot, zero_small, StatRow, ZERO_THRESHOLD};
pub use sweep::{parse_rho_values, rho_sweep, write_sweep, SweepPlan, SweepReport, SweepRow};

/// Shortest decimal text that parses back to the same `f64`.
///
/// Uses plain notation for moderate magnitudes and scientific notation
/// otherwise, so tiny errors do not turn into hundreds of zeros.
pub fn format_float(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !v.is_finite() || (1e-4..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::format_float;

    #[test]
    fn floats_round_trip() {
        for v in [0.0, -0.0, 1.0, 0.1, 1e-8, 2.5e-300, 123456.789, -7.25e20, f64::MIN_POSITIVE, 1.0 / 3.0] {
            let text = format_float(v);
            assert_eq!(text.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{text}");
        }
        assert_eq!(format_float(1e-8), "1e-8");
        assert_eq!(format_float(0.25), "0.25");
    }
}
