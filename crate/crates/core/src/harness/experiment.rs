use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;

use super::format_float;
use super::stats::{aggregate, floor_for_boxplot, StatRow};
use crate::benchmarks::Benchmark;
use crate::error::{Error, Result};
use crate::optimizer::run;
use crate::types::{OptimizerConfig, Termination, TracePoint};

pub const DEFAULT_RUNS: usize = 30;
/// Environment variable naming the default output directory of the CLI.
pub const OUTPUT_DIR_ENV: &str = "PEOA_OUT_DIR";

/// What to run: every listed function at every listed dimension, `runs`
/// times each.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub functions: Vec<Benchmark>,
    pub dimensions: Vec<usize>,
    pub runs: usize,
    pub base_seed: u64,
    /// Evaluation budget per run; `None` means 10000·D.
    pub max_evals: Option<u64>,
    pub tolerance: f64,
    /// Territory fraction; `None` keeps the optimizer default.
    pub territory_fraction: Option<f64>,
    /// Worker threads; `None` uses every logical core.
    pub jobs: Option<usize>,
}

impl ExperimentPlan {
    pub fn new(functions: Vec<Benchmark>, dimensions: Vec<usize>) -> Self {
        Self {
            functions,
            dimensions,
            runs: DEFAULT_RUNS,
            base_seed: 0,
            max_evals: None,
            tolerance: 1e-8,
            territory_fraction: None,
            jobs: None,
        }
    }

    /// Parses `all` or a comma-separated list of function names.
    /// An empty string gives an empty list.
    pub fn parse_functions(spec: &str) -> Result<Vec<Benchmark>> {
        if spec.trim().eq_ignore_ascii_case("all") {
            return Ok(Benchmark::ALL.to_vec());
        }
        spec.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(Benchmark::from_name)
            .collect()
    }

    pub fn with_runs(mut self, runs: usize) -> Self {
        self.runs = runs;
        self
    }

    pub fn with_base_seed(mut self, seed: u64) -> Self {
        self.base_seed = seed;
        self
    }

    pub fn with_max_evals(mut self, max_evals: Option<u64>) -> Self {
        self.max_evals = max_evals;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_territory_fraction(mut self, rho: Option<f64>) -> Self {
        self.territory_fraction = rho;
        self
    }

    pub fn with_jobs(mut self, jobs: Option<usize>) -> Self {
        self.jobs = jobs;
        self
    }

    /// Seed of run `run`.
    pub fn seed(&self, run: usize) -> u64 {
        self.base_seed.wrapping_add(run as u64)
    }

    /// Optimizer configuration for one run.
    pub fn config(&self, dimension: usize, run: usize) -> OptimizerConfig {
        let mut cfg = OptimizerConfig::for_dimension(dimension)
            .with_seed(self.seed(run))
            .with_tolerance(self.tolerance);
        if let Some(max_evals) = self.max_evals {
            cfg = cfg.with_max_evals(max_evals);
        }
        if let Some(rho) = self.territory_fraction {
            cfg = cfg.with_territory_fraction(rho);
        }
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Config("runs must be positive".into()));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::Config(format!("tolerance must be non-negative, got {}", self.tolerance)));
        }
        if self.jobs == Some(0) {
            return Err(Error::Config("jobs must be positive".into()));
        }
        for &d in &self.dimensions {
            if d == 0 {
                return Err(Error::Config("dimensions must be positive".into()));
            }
            self.config(d, 0).validate()?;
        }
        Ok(())
    }
}

/// One run of an experiment. `error` is the raw function value error.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub function: Benchmark,
    pub dimension: usize,
    pub run: usize,
    pub seed: u64,
    pub error: f64,
    pub best_value: f64,
    pub evals: u64,
    pub terminated_by: Termination,
    pub trace: Vec<TracePoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    /// Sorted by (function, dimension, run).
    pub runs: Vec<RunRow>,
    /// One row per (function, dimension), in the same order.
    pub stats: Vec<StatRow>,
}

/// Paths written by [`write_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct OutputFiles {
    pub stats: PathBuf,
    pub runs: PathBuf,
    pub boxplot: PathBuf,
    pub traces: PathBuf,
    pub metadata: PathBuf,
}

/// Executes every run of the plan on a worker pool.
pub fn execute(plan: &ExperimentPlan) -> Result<ExperimentReport> {
    plan.validate()?;
    if plan.functions.is_empty() || plan.dimensions.is_empty() {
        log::warn!("experiment plan selects no functions or dimensions; nothing to run");
    }
    let tasks: Vec<(Benchmark, usize, usize)> = plan
        .functions
        .iter()
        .flat_map(|&b| {
            plan.dimensions
                .iter()
                .flat_map(move |&d| (0..plan.runs).map(move |r| (b, d, r)))
        })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let mut rows = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(b, d, r)| run_one(plan, b, d, r))
            .collect::<Result<Vec<_>>>()
    })?;
    rows.sort_by_key(|row| (row.function.spec().index, row.dimension, row.run));

    let mut stats = Vec::new();
    for group in rows.chunk_by(|a, b| a.function == b.function && a.dimension == b.dimension) {
        let errors: Vec<f64> = group.iter().map(|r| r.error).collect();
        let evals: Vec<u64> = group.iter().map(|r| r.evals).collect();
        stats.extend(aggregate(group[0].function, group[0].dimension, &errors, &evals, plan.tolerance));
    }
    Ok(ExperimentReport { runs: rows, stats })
}

fn run_one(plan: &ExperimentPlan, b: Benchmark, d: usize, r: usize) -> Result<RunRow> {
    let cfg = plan.config(d, r);
    let mut objective = b.objective(d, cfg.seed);
    let space = b.search_space(d)?;
    let record = run(&mut objective, &space, &cfg)?;
    let error = record.error(b.spec().f_true);
    log::debug!("{} D={d} run {r}: error {error:e} after {} evals", b.spec().id, record.evals_used);
    Ok(RunRow {
        function: b,
        dimension: d,
        run: r,
        seed: cfg.seed,
        error,
        best_value: record.best_value,
        evals: record.evals_used,
        terminated_by: record.terminated_by,
        trace: record.trace,
    })
}

/// Runs the plan and writes its report into `dir`.
pub fn run_experiment(plan: &ExperimentPlan, dir: &Path) -> Result<(ExperimentReport, OutputFiles)> {
    let report = execute(plan)?;
    let files = write_report(&report, plan, dir)?;
    Ok((report, files))
}

/// Writes `stats.csv`, `runs.csv`, `boxplot.csv`, `traces.csv` and
/// `metadata.txt` into `dir`, creating it if needed. Everything except the
/// metadata file is a pure function of the plan.
pub fn write_report(report: &ExperimentReport, plan: &ExperimentPlan, dir: &Path) -> Result<OutputFiles> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = OutputFiles {
        stats: dir.join("stats.csv"),
        runs: dir.join("runs.csv"),
        boxplot: dir.join("boxplot.csv"),
        traces: dir.join("traces.csv"),
        metadata: dir.join("metadata.txt"),
    };

    write_csv(
        &files.stats,
        &["function", "dimension", "runs", "mean", "best", "worst", "std_sample_n_minus_1", "mean_evals", "successes"],
        report.stats.iter().map(|s| {
            vec![
                s.function.spec().id.to_string(),
                s.dimension.to_string(),
                s.runs.to_string(),
                format_float(s.mean),
                format_float(s.best),
                format_float(s.worst),
                format_float(s.std),
                format_float(s.mean_evals),
                s.successes.to_string(),
            ]
        }),
    )?;
    write_csv(
        &files.runs,
        &["function", "dimension", "run", "seed", "error", "best_value", "evals", "terminated_by"],
        report.runs.iter().map(|r| {
            vec![
                r.function.spec().id.to_string(),
                r.dimension.to_string(),
                r.run.to_string(),
                r.seed.to_string(),
                format_float(r.error),
                format_float(r.best_value),
                r.evals.to_string(),
                r.terminated_by.as_str().to_string(),
            ]
        }),
    )?;
    write_csv(
        &files.boxplot,
        &["function", "dimension", "run", "error_floored"],
        report.runs.iter().map(|r| {
            vec![
                r.function.spec().id.to_string(),
                r.dimension.to_string(),
                r.run.to_string(),
                format_float(floor_for_boxplot(r.error)),
            ]
        }),
    )?;
    write_csv(
        &files.traces,
        &["function", "dimension", "run", "evals", "best_value"],
        report.runs.iter().flat_map(|r| {
            r.trace.iter().map(move |t| {
                vec![
                    r.function.spec().id.to_string(),
                    r.dimension.to_string(),
                    r.run.to_string(),
                    t.evals.to_string(),
                    format_float(t.best),
                ]
            })
        }),
    )?;

    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let functions: Vec<&str> = plan.functions.iter().map(|b| b.spec().id).collect();
    let dims: Vec<String> = plan.dimensions.iter().map(usize::to_string).collect();
    let metadata = format!(
        "created_unix = {timestamp}\nversion = {}\nfunctions = {}\ndims = {}\nruns = {}\nseed = {}\nmax_evals = {}\ntolerance = {}\nrho = {}\n",
        env!("CARGO_PKG_VERSION"),
        functions.join(","),
        dims.join(","),
        plan.runs,
        plan.base_seed,
        plan.max_evals.map_or("10000*D".to_string(), |m| m.to_string()),
        format_float(plan.tolerance),
        plan.territory_fraction.map_or("default".to_string(), format_float),
    );
    fs::write(&files.metadata, metadata).map_err(|e| Error::io(&files.metadata, e))?;
    Ok(files)
}

pub(crate) fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut writer = csv::Writer::from_path(path).map_err(csv_err)?;
    writer.write_record(header).map_err(csv_err)?;
    for row in rows {
        writer.write_record(&row).map_err(csv_err)?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_function_lists() {
        assert_eq!(ExperimentPlan::parse_functions("all").unwrap().len(), 20);
        assert_eq!(
            ExperimentPlan::parse_functions("sphere, rastrigin").unwrap(),
            vec![Benchmark::Sphere, Benchmark::Rastrigin]
        );
        assert!(ExperimentPlan::parse_functions("").unwrap().is_empty());
        assert!(ExperimentPlan::parse_functions("nope").is_err());
    }

    #[test]
    fn seeds_and_budget() {
        let plan = ExperimentPlan::new(vec![Benchmark::Sphere], vec![5]).with_base_seed(100);
        assert_eq!(plan.seed(3), 103);
        assert_eq!(plan.config(5, 3).max_evals, 50_000);
        assert_eq!(plan.with_max_evals(Some(900)).config(2, 0).max_evals, 900);
    }

    #[test]
    fn rows_sorted_and_grouped() {
        let plan = ExperimentPlan::new(vec![Benchmark::Rastrigin, Benchmark::Sphere], vec![2])
            .with_runs(3)
            .with_jobs(Some(2));
        let report = execute(&plan).unwrap();
        let keys: Vec<_> = report.runs.iter().map(|r| (r.function, r.run)).collect();
        assert_eq!(keys[0], (Benchmark::Sphere, 0));
        assert_eq!(keys[5], (Benchmark::Rastrigin, 2));
        assert_eq!(report.stats.len(), 2);
    }
}
