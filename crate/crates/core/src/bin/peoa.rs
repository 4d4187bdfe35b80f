use std::io;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use peoa::benchmarks::{self, Benchmark};
use peoa::harness::{
    self, config_args, format_float, parse_rho_values, read_config, ExperimentPlan, ExternalObjective, SweepPlan,
    OUTPUT_DIR_ENV,
};
use peoa::sampling::seeded;
use peoa::{OptimizerConfig, SearchSpace};

/// Philippine Eagle Optimization Algorithm: benchmark experiments and
/// external objectives.
///
/// Every subcommand accepts `--config <file>` with flat `key = value` lines
/// named after its flags; flags given on the command line win.
#[derive(Parser)]
#[command(name = "peoa", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run benchmark functions repeatedly and write CSV reports.
    #[command(args_override_self = true)]
    Run(RunArgs),
    /// Compare territory fractions over the benchmark suite.
    #[command(args_override_self = true)]
    SweepRho(SweepArgs),
    /// List the benchmark functions.
    ListFunctions,
    /// Check every deterministic benchmark against its known optimum.
    #[command(args_override_self = true)]
    VerifySuite(VerifyArgs),
    /// Minimize an objective served by a child process.
    #[command(args_override_self = true)]
    RunExternal(ExternalArgs),
    /// Serve a benchmark over the line protocol on stdin/stdout.
    #[command(args_override_self = true)]
    ServeFunction(ServeArgs),
}

#[derive(Args)]
struct Common {
    /// Flat key = value file with defaults for these flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, env = OUTPUT_DIR_ENV, default_value = "results")]
    out: PathBuf,
    /// Worker threads (default: logical cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Base seed; run r uses seed + r.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Evaluations per run (default: 10000 * dim).
    #[arg(long)]
    max_evals: Option<u64>,
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
}

#[derive(Args)]
struct RunArgs {
    /// Function name, comma-separated names, or `all`.
    #[arg(long, default_value = "all")]
    function: String,
    /// Dimensions, comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "5")]
    dim: Vec<usize>,
    #[arg(long, default_value_t = 30)]
    runs: usize,
    /// Territory fraction.
    #[arg(long)]
    rho: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SweepArgs {
    /// `a..b`, `a..b:step` or a comma-separated list.
    #[arg(long, default_value = "0.01..0.1")]
    values: String,
    #[arg(long, default_value_t = 20)]
    runs: usize,
    #[arg(long, default_value_t = 5)]
    dim: usize,
    #[arg(long, default_value = "all")]
    function: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "2,5,10,20")]
    dims: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ExternalArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Shell command of the child process.
    #[arg(long)]
    cmd: String,
    #[arg(long)]
    dim: usize,
    /// Lower bounds, comma-separated; a single value applies to every coordinate.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lower: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    upper: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_evals: Option<u64>,
    /// Known minimum; enables stopping at the tolerance.
    #[arg(long, allow_hyphen_values = true)]
    optimum: Option<f64>,
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
    /// Seconds to wait for each reply.
    #[arg(long, default_value_t = 30.0)]
    timeout: f64,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    function: String,
    /// Seed of the stochastic function's coefficients.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match with_config_file(std::env::args().collect()).map(Cli::parse_from) {
        Ok(cli) => cli,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(partial) = e.partial_record() {
                eprintln!(
                    "partial run: {} evaluations, best value {}",
                    partial.evals_used,
                    format_float(partial.best_value)
                );
            }
            ExitCode::FAILURE
        }
    }
}

/// Splices the entries of `--config <file>` in right after the subcommand,
/// so that flags given later on the command line override them.
fn with_config_file(mut argv: Vec<String>) -> peoa::Result<Vec<String>> {
    let mut path = None;
    for (i, arg) in argv.iter().enumerate() {
        if let Some(p) = arg.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        } else if arg == "--config" {
            path = argv.get(i + 1).map(PathBuf::from);
        }
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    let entries = read_config(&path)?;
    let at = argv.iter().skip(1).position(|a| !a.starts_with('-')).map_or(argv.len(), |p| p + 2);
    let extra = config_args(&entries);
    argv.splice(at..at, extra);
    Ok(argv)
}

fn dispatch(command: Cmd) -> peoa::Result<()> {
    match command {
        Cmd::Run(args) => run(args),
        Cmd::SweepRho(args) => sweep(args),
        Cmd::ListFunctions => {
            println!("{:>2}  {:<16} {:<18} {:<24} {:>16}  f_true", "#", "id", "name", "family", "range");
            for b in Benchmark::ALL {
                let s = b.spec();
                println!(
                    "{:>2}  {:<16} {:<18} {:<24} {:>16}  {}{}",
                    s.index,
                    s.id,
                    s.name,
                    s.family.to_string(),
                    format!("[{}, {}]", s.range.0, s.range.1),
                    s.f_true,
                    if s.stochastic { "  (stochastic)" } else { "" }
                );
            }
            Ok(())
        }
        Cmd::VerifySuite(args) => {
            let mut rng = seeded(args.seed);
            let reports = benchmarks::verify_suite(&args.dims, &mut rng)?;
            for r in &reports {
                println!(
                    "ok  {:<16} D={:<3} f(x_true)={:<12} min of {} samples={}",
                    r.benchmark.spec().id,
                    r.dimension,
                    format_float(r.value_at_x_true),
                    r.samples,
                    format_float(r.min_sampled)
                );
            }
            println!("{} checks passed", reports.len());
            Ok(())
        }
        Cmd::RunExternal(args) => run_external(args),
        Cmd::ServeFunction(args) => {
            let b = Benchmark::from_name(&args.function)?;
            // The dimension only matters for the known minimizer, which is unused here.
            let mut objective = b.objective(0, args.seed);
            harness::serve(&mut objective, io::stdin().lock(), io::stdout().lock())
        }
    }
}

fn run(args: RunArgs) -> peoa::Result<()> {
    let c = args.common;
    let plan = ExperimentPlan::new(ExperimentPlan::parse_functions(&args.function)?, args.dim)
        .with_runs(args.runs)
        .with_base_seed(c.seed)
        .with_max_evals(c.max_evals)
        .with_tolerance(c.tolerance)
        .with_territory_fraction(args.rho)
        .with_jobs(c.jobs);
    let (report, files) = harness::run_experiment(&plan, &c.out)?;
    println!(
        "{:<16} {:>3} {:>12} {:>12} {:>12} {:>12} {:>10} {:>7}",
        "function", "D", "mean", "best", "worst", "std", "evals", "success"
    );
    for s in &report.stats {
        println!(
            "{:<16} {:>3} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>10.0} {:>4}/{}",
            s.function.spec().id,
            s.dimension,
            s.mean,
            s.best,
            s.worst,
            s.std,
            s.mean_evals,
            s.successes,
            s.runs
        );
    }
    println!("wrote {}", files.stats.parent().unwrap_or(&c.out).display());
    Ok(())
}

fn sweep(args: SweepArgs) -> peoa::Result<()> {
    let c = args.common;
    let mut plan = SweepPlan::new(parse_rho_values(&args.values)?, args.dim, args.runs);
    plan.base = plan
        .base
        .with_base_seed(c.seed)
        .with_max_evals(c.max_evals)
        .with_tolerance(c.tolerance)
        .with_jobs(c.jobs);
    plan.base.functions = ExperimentPlan::parse_functions(&args.function)?;
    let report = harness::rho_sweep(&plan)?;
    let path = harness::write_sweep(&report, &c.out)?;
    for (i, row) in report.rows.iter().enumerate() {
        let mark = if report.best == Some(i) { "  <- best" } else { "" };
        println!("rho {:<6} average error {:.4e}{mark}", format_float(row.rho), row.average);
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn broadcast(values: &[f64], dim: usize, name: &str) -> peoa::Result<Vec<f64>> {
    match values.len() {
        1 => Ok(vec![values[0]; dim]),
        n if n == dim => Ok(values.to_vec()),
        n => Err(peoa::Error::Config(format!("--{name} has {n} values for dimension {dim}"))),
    }
}

fn run_external(args: ExternalArgs) -> peoa::Result<()> {
    let space = SearchSpace::new(
        broadcast(&args.lower, args.dim, "lower")?,
        broadcast(&args.upper, args.dim, "upper")?,
    )?;
    if !(args.timeout > 0.0 && args.timeout.is_finite()) {
        return Err(peoa::Error::Config(format!("timeout must be positive, got {}", args.timeout)));
    }
    let mut objective = ExternalObjective::spawn(&args.cmd)?.with_timeout(Duration::from_secs_f64(args.timeout));
    if let Some(f_true) = args.optimum {
        objective = objective.with_optimum(f_true);
    }
    let mut config = OptimizerConfig::for_dimension(args.dim)
        .with_seed(args.seed)
        .with_tolerance(args.tolerance);
    if let Some(m) = args.max_evals {
        config = config.with_max_evals(m);
    }
    let record = peoa::run(&mut objective, &space, &config)?;
    let position: Vec<String> = record.best_position.iter().map(|&v| format_float(v)).collect();
    println!("best_value = {}", format_float(record.best_value));
    println!("best_position = {}", position.join(","));
    println!("evals = {}", record.evals_used);
    println!("terminated_by = {}", record.terminated_by.as_str());
    Ok(())
}
