use std::path::{Path, PathBuf};

use super::experiment::{execute, write_csv, ExperimentPlan};
use super::format_float;
use crate::benchmarks::Benchmark;
use crate::error::{Error, Result};

/// Territory fractions to compare, each run over the same plan.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub values: Vec<f64>,
    /// Functions, dimension, runs, seeds and budget shared by every value.
    pub base: ExperimentPlan,
}

impl SweepPlan {
    /// All benchmarks at dimension `dimension`, `runs` runs per value.
    pub fn new(values: Vec<f64>, dimension: usize, runs: usize) -> Self {
        Self {
            values,
            base: ExperimentPlan::new(Benchmark::ALL.to_vec(), vec![dimension]).with_runs(runs),
        }
    }
}

/// Results for one territory fraction.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub rho: f64,
    /// Mean error per (function, dimension) in plan order, with errors
    /// below 1e-8 counted as 0.
    pub means: Vec<f64>,
    /// Average of `means`.
    pub average: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub functions: Vec<(Benchmark, usize)>,
    pub rows: Vec<SweepRow>,
    /// Row with the smallest average; the first one on ties.
    pub best: Option<usize>,
}

impl SweepReport {
    pub fn best_row(&self) -> Option<&SweepRow> {
        self.best.map(|i| &self.rows[i])
    }
}

/// Parses `a..b` (step 0.01), `a..b:step`, or a comma-separated list.
/// Every value must lie in (0, 1).
pub fn parse_rho_values(spec: &str) -> Result<Vec<f64>> {
    let bad = |msg: String| Error::Config(format!("invalid rho values `{spec}`: {msg}"));
    let number = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|e| bad(format!("`{}`: {e}", s.trim())))
    };
    let values = if let Some((start, rest)) = spec.split_once("..") {
        let (end, step) = match rest.split_once(':') {
            Some((end, step)) => (number(end)?, number(step)?),
            None => (number(rest)?, 0.01),
        };
        let start = number(start)?;
        if !(step > 0.0) || end < start {
            return Err(bad("need start <= end and a positive step".into()));
        }
        // The slack keeps an end point like 0.1 that is a whole number of
        // steps; rounding to 12 decimals turns 0.060000000000000005 into 0.06.
        let count = ((end - start) / step + 1e-9).floor() as usize;
        (0..=count)
            .map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12)
            .collect()
    } else {
        spec.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(number)
            .collect::<Result<Vec<_>>>()?
    };
    if values.is_empty() {
        return Err(bad("no values".into()));
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0 && **v < 1.0)) {
        return Err(bad(format!("{v} is outside (0, 1)")));
    }
    Ok(values)
}

/// Runs the base plan once per territory fraction.
pub fn rho_sweep(plan: &SweepPlan) -> Result<SweepReport> {
    let mut functions = Vec::new();
    let mut rows = Vec::new();
    for &rho in &plan.values {
        let exp = plan.base.clone().with_territory_fraction(Some(rho));
        let report = execute(&exp)?;
        functions = report.stats.iter().map(|s| (s.function, s.dimension)).collect();
        let means: Vec<f64> = report.stats.iter().map(|s| s.mean).collect();
        let average = if means.is_empty() {
            f64::NAN
        } else {
            means.iter().sum::<f64>() / means.len() as f64
        };
        log::info!("rho {rho}: average error {average:e}");
        rows.push(SweepRow { rho, means, average });
    }
    let best = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.average.is_nan())
        .min_by(|a, b| a.1.average.total_cmp(&b.1.average))
        .map(|(i, _)| i);
    Ok(SweepReport { functions, rows, best })
}

/// Writes `sweep.csv`: one row per territory fraction, one column per
/// function, then the average and a flag on the best row.
pub fn write_sweep(report: &SweepReport, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join("sweep.csv");
    let mut header = vec!["rho".to_string()];
    header.extend(report.functions.iter().map(|(b, d)| format!("{}_d{d}", b.spec().id)));
    header.extend(["average".to_string(), "best".to_string()]);
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(
        &path,
        &header,
        report.rows.iter().enumerate().map(|(i, row)| {
            let mut fields = vec![format_float(row.rho)];
            fields.extend(row.means.iter().map(|&m| format_float(m)));
            fields.push(format_float(row.average));
            fields.push((report.best == Some(i)).to_string());
            fields
        }),
    )?;
    Ok(path)
}
