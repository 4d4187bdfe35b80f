use crate::benchmarks::Benchmark;

/// Errors below this are reported as exact (zero) in the statistics and
/// drawn at this level in the boxplot data.
pub const ZERO_THRESHOLD: f64 = 1e-8;

/// Aggregate over the runs of one function at one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct StatRow {
    pub function: Benchmark,
    pub dimension: usize,
    pub runs: usize,
    pub mean: f64,
    pub best: f64,
    pub worst: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single run.
    pub std: f64,
    /// Mean evaluations at termination, over all runs.
    pub mean_evals: f64,
    /// Runs whose raw error fell below the plan tolerance.
    pub successes: usize,
}

/// Maps errors below [`ZERO_THRESHOLD`] to 0.
pub fn zero_small(error: f64) -> f64 {
    if error < ZERO_THRESHOLD {
        0.0
    } else {
        error
    }
}

/// Raises errors to at least [`ZERO_THRESHOLD`] for log-scale plots.
pub fn floor_for_boxplot(error: f64) -> f64 {
    error.max(ZERO_THRESHOLD)
}

/// Summarizes raw errors and evaluation counts of one (function, D) group.
/// Returns `None` for an empty group.
pub fn aggregate(
    function: Benchmark,
    dimension: usize,
    errors: &[f64],
    evals: &[u64],
    tolerance: f64,
) -> Option<StatRow> {
    if errors.is_empty() {
        return None;
    }
    let n = errors.len() as f64;
    let zeroed: Vec<f64> = errors.iter().map(|&e| zero_small(e)).collect();
    let mean = zeroed.iter().sum::<f64>() / n;
    let best = zeroed.iter().copied().fold(f64::INFINITY, f64::min);
    let worst = zeroed.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let std = if errors.len() > 1 {
        (zeroed.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let mean_evals = evals.iter().map(|&e| e as f64).sum::<f64>() / evals.len().max(1) as f64;
    Some(StatRow {
        function,
        dimension,
        runs: errors.len(),
        mean,
        best,
        worst,
        std,
        mean_evals,
        successes: errors.iter().filter(|&&e| e < tolerance).count(),
    })
}
