//! Twenty classic test functions grouped by modality and separability, with
//! their search ranges and known minima.
//!
//! Formulas index coordinates from 1 where the index appears in the formula
//! (Powell Sum, Sum Squares, Qing, Xin-She Yang 1, Zakharov, Griewank).

use std::f64::consts::{E, PI};
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::sampling::{fork, RandomSource};
use crate::types::{Objective, SearchSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    UnimodalSeparable,
    MultimodalSeparable,
    UnimodalNonseparable,
    MultimodalNonseparable,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::UnimodalSeparable => "unimodal-separable",
            Family::MultimodalSeparable => "multimodal-separable",
            Family::UnimodalNonseparable => "unimodal-nonseparable",
            Family::MultimodalNonseparable => "multimodal-nonseparable",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Benchmark {
    PowellSum,
    Schwefel220,
    Schwefel221,
    Sphere,
    SumSquares,
    Alpine1,
    Wavy,
    Qing,
    Rastrigin,
    XinSheYang1,
    Brown,
    Rosenbrock,
    Schwefel222,
    XinSheYang3,
    Zakharov,
    Ackley,
    Periodic,
    Griewank,
    Salomon,
    XinSheYang4,
}

/// Static description of a benchmark.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchmarkSpec {
    /// Position in the suite, 1 to 20.
    pub index: usize,
    /// Machine-friendly identifier, e.g. `schwefel_2_20`.
    pub id: &'static str,
    pub name: &'static str,
    pub family: Family,
    pub range: (f64, f64),
    pub f_true: f64,
    pub x_true: &'static str,
    pub stochastic: bool,
}

const fn spec(
    index: usize,
    id: &'static str,
    name: &'static str,
    family: Family,
    range: (f64, f64),
    f_true: f64,
    x_true: &'static str,
) -> BenchmarkSpec {
    BenchmarkSpec {
        index,
        id,
        name,
        family,
        range,
        f_true,
        x_true,
        stochastic: false,
    }
}

const ORIGIN: &str = "(0, ..., 0)";

impl Benchmark {
    pub const ALL: [Benchmark; 20] = [
        Benchmark::PowellSum,
        Benchmark::Schwefel220,
        Benchmark::Schwefel221,
        Benchmark::Sphere,
        Benchmark::SumSquares,
        Benchmark::Alpine1,
        Benchmark::Wavy,
        Benchmark::Qing,
        Benchmark::Rastrigin,
        Benchmark::XinSheYang1,
        Benchmark::Brown,
        Benchmark::Rosenbrock,
        Benchmark::Schwefel222,
        Benchmark::XinSheYang3,
        Benchmark::Zakharov,
        Benchmark::Ackley,
        Benchmark::Periodic,
        Benchmark::Griewank,
        Benchmark::Salomon,
        Benchmark::XinSheYang4,
    ];

    pub fn spec(self) -> BenchmarkSpec {
        use Family::*;
        match self {
            Benchmark::PowellSum => spec(1, "powell_sum", "Powell Sum", UnimodalSeparable, (-1.0, 1.0), 0.0, ORIGIN),
            Benchmark::Schwefel220 => spec(2, "schwefel_2_20", "Schwefel 2.20", UnimodalSeparable, (-100.0, 100.0), 0.0, ORIGIN),
            Benchmark::Schwefel221 => spec(3, "schwefel_2_21", "Schwefel 2.21", UnimodalSeparable, (-100.0, 100.0), 0.0, ORIGIN),
            Benchmark::Sphere => spec(4, "sphere", "Sphere", UnimodalSeparable, (-5.12, 5.12), 0.0, ORIGIN),
            Benchmark::SumSquares => spec(5, "sum_squares", "Sum Squares", UnimodalSeparable, (-10.0, 10.0), 0.0, ORIGIN),
            Benchmark::Alpine1 => spec(6, "alpine_1", "Alpine 1", MultimodalSeparable, (0.0, 10.0), 0.0, ORIGIN),
            Benchmark::Wavy => spec(7, "wavy", "Wavy", MultimodalSeparable, (-PI, PI), 0.0, ORIGIN),
            Benchmark::Qing => spec(8, "qing", "Qing", MultimodalSeparable, (-500.0, 500.0), 0.0, "(±1, ±√2, ..., ±√D)"),
            Benchmark::Rastrigin => spec(9, "rastrigin", "Rastrigin", MultimodalSeparable, (-5.12, 5.12), 0.0, ORIGIN),
            Benchmark::XinSheYang1 => BenchmarkSpec {
                stochastic: true,
                ..spec(10, "xin_she_yang_1", "Xin-She Yang 1", MultimodalSeparable, (-5.0, 5.0), 0.0, ORIGIN)
            },
            Benchmark::Brown => spec(11, "brown", "Brown", UnimodalNonseparable, (-1.0, 4.0), 0.0, ORIGIN),
            Benchmark::Rosenbrock => spec(12, "rosenbrock", "Rosenbrock", UnimodalNonseparable, (-5.0, 10.0), 0.0, "(1, ..., 1)"),
            Benchmark::Schwefel222 => spec(13, "schwefel_2_22", "Schwefel 2.22", UnimodalNonseparable, (-100.0, 100.0), 0.0, ORIGIN),
            Benchmark::XinSheYang3 => spec(14, "xin_she_yang_3", "Xin-She Yang 3", UnimodalNonseparable, (-2.0 * PI, 2.0 * PI), -1.0, ORIGIN),
            Benchmark::Zakharov => spec(15, "zakharov", "Zakharov", UnimodalNonseparable, (-5.0, 10.0), 0.0, ORIGIN),
            Benchmark::Ackley => spec(16, "ackley", "Ackley", MultimodalNonseparable, (-32.768, 32.768), 0.0, ORIGIN),
            Benchmark::Periodic => spec(17, "periodic", "Periodic", MultimodalNonseparable, (-10.0, 10.0), 0.9, ORIGIN),
            Benchmark::Griewank => spec(18, "griewank", "Griewank", MultimodalNonseparable, (-100.0, 100.0), 0.0, ORIGIN),
            Benchmark::Salomon => spec(19, "salomon", "Salomon", MultimodalNonseparable, (-100.0, 100.0), 0.0, ORIGIN),
            Benchmark::XinSheYang4 => spec(20, "xin_she_yang_4", "Xin-She Yang 4", MultimodalNonseparable, (-10.0, 10.0), -1.0, ORIGIN),
        }
    }

    /// Looks a benchmark up by id or display name, ignoring case, spaces,
    /// dots, dashes and underscores (`"Schwefel 2.20"`, `"schwefel-2-20"`).
    pub fn from_name(name: &str) -> Result<Self> {
        let key = normalize(name);
        Self::ALL
            .into_iter()
            .find(|b| normalize(b.spec().id) == key || normalize(b.spec().name) == key)
            .ok_or_else(|| Error::UnknownFunction(name.to_string()))
    }

    pub fn by_family(family: Family) -> impl Iterator<Item = Benchmark> {
        Self::ALL.into_iter().filter(move |b| b.spec().family == family)
    }

    pub fn search_space(self, dimension: usize) -> Result<SearchSpace> {
        let (lo, hi) = self.spec().range;
        SearchSpace::uniform(dimension, lo, hi)
    }

    /// A known minimizer, or `None` for the stochastic function.
    pub fn x_true(self, dimension: usize) -> Option<Vec<f64>> {
        match self {
            Benchmark::XinSheYang1 => None,
            Benchmark::Qing => Some((1..=dimension).map(|i| (i as f64).sqrt()).collect()),
            Benchmark::Rosenbrock => Some(vec![1.0; dimension]),
            _ => Some(vec![0.0; dimension]),
        }
    }

    /// Evaluates a deterministic benchmark. The stochastic Xin-She Yang 1
    /// draws its coefficients from `rng`; pass `None` only for the others.
    pub fn evaluate(self, x: &[f64], rng: Option<&mut RandomSource>) -> f64 {
        let d = x.len() as f64;
        let idx = |i: usize| (i + 1) as f64;
        match self {
            Benchmark::PowellSum => x
                .iter()
                .enumerate()
                .map(|(i, v)| v.abs().powf(idx(i) + 1.0))
                .sum(),
            Benchmark::Schwefel220 => x.iter().map(|v| v.abs()).sum(),
            Benchmark::Schwefel221 => x.iter().fold(0.0, |m, v| m.max(v.abs())),
            Benchmark::Sphere => x.iter().map(|v| v * v).sum(),
            Benchmark::SumSquares => x.iter().enumerate().map(|(i, v)| idx(i) * v * v).sum(),
            Benchmark::Alpine1 => x.iter().map(|v| (v * v.sin() + 0.1 * v).abs()).sum(),
            Benchmark::Wavy => {
                1.0 - x
                    .iter()
                    .map(|v| (10.0 * v).cos() * (-0.5 * v * v).exp())
                    .sum::<f64>()
                    / d
            }
            Benchmark::Qing => x
                .iter()
                .enumerate()
                .map(|(i, v)| (v * v - idx(i)).powi(2))
                .sum(),
            Benchmark::Rastrigin => {
                10.0 * d + x.iter().map(|v| v * v - 10.0 * (2.0 * PI * v).cos()).sum::<f64>()
            }
            Benchmark::XinSheYang1 => {
                let rng = rng.expect("Xin-She Yang 1 needs a random source");
                x.iter()
                    .enumerate()
                    .map(|(i, v)| rng.random::<f64>() * v.abs().powf(idx(i)))
                    .sum()
            }
            Benchmark::Brown => x
                .windows(2)
                .map(|w| {
                    let (a, b) = (w[0] * w[0], w[1] * w[1]);
                    a.powf(b + 1.0) + b.powf(a + 1.0)
                })
                .sum(),
            Benchmark::Rosenbrock => x
                .windows(2)
                .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
                .sum(),
            Benchmark::Schwefel222 => {
                x.iter().map(|v| v.abs()).sum::<f64>() + x.iter().map(|v| v.abs()).product::<f64>()
            }
            Benchmark::XinSheYang3 => {
                let a: f64 = x.iter().map(|v| (v / 15.0).powi(10)).sum();
                let b: f64 = x.iter().map(|v| v * v).sum();
                let c: f64 = x.iter().map(|v| v.cos().powi(2)).product();
                (-a).exp() - 2.0 * (-b).exp() * c
            }
            Benchmark::Zakharov => {
                let s1: f64 = x.iter().map(|v| v * v).sum();
                let s2: f64 = x.iter().enumerate().map(|(i, v)| 0.5 * idx(i) * v).sum();
                s1 + s2.powi(2) + s2.powi(4)
            }
            Benchmark::Ackley => {
                let sq: f64 = x.iter().map(|v| v * v).sum::<f64>() / d;
                let cs: f64 = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / d;
                -20.0 * (-0.2 * sq.sqrt()).exp() - cs.exp() + 20.0 + E
            }
            Benchmark::Periodic => {
                let s: f64 = x.iter().map(|v| v.sin().powi(2)).sum();
                let r: f64 = x.iter().map(|v| v * v).sum();
                1.0 + s - 0.1 * (-r).exp()
            }
            Benchmark::Griewank => {
                let s: f64 = x.iter().map(|v| v * v / 4000.0).sum();
                let p: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v / idx(i).sqrt()).cos())
                    .product();
                1.0 + s - p
            }
            Benchmark::Salomon => {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                1.0 - (2.0 * PI * r).cos() + 0.1 * r
            }
            Benchmark::XinSheYang4 => {
                let s: f64 = x.iter().map(|v| v.sin().powi(2)).sum();
                let r: f64 = x.iter().map(|v| v * v).sum();
                let t: f64 = x.iter().map(|v| v.abs().sqrt().sin().powi(2)).sum();
                (s - (-r).exp()) * (-t).exp()
            }
        }
    }

    /// A ready-to-run objective. `seed` feeds the stochastic function's
    /// coefficient stream and is ignored by the deterministic ones.
    pub fn objective(self, dimension: usize, seed: u64) -> BenchmarkObjective {
        BenchmarkObjective {
            benchmark: self,
            dimension,
            rng: self.spec().stochastic.then(|| fork(seed, COEFFICIENT_STREAM)),
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.spec().name)
    }
}

// Keeps the stochastic coefficients independent of the optimizer stream.
const COEFFICIENT_STREAM: u64 = 0x5eed;

fn normalize(name: &str) -> String {
    name.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

/// A benchmark bound to a dimension, usable as an [`Objective`].
#[derive(Debug, Clone)]
pub struct BenchmarkObjective {
    benchmark: Benchmark,
    dimension: usize,
    rng: Option<RandomSource>,
}

impl BenchmarkObjective {
    pub fn benchmark(&self) -> Benchmark {
        self.benchmark
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }
}

impl Objective for BenchmarkObjective {
    fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        Ok(self.benchmark.evaluate(x, self.rng.as_mut()))
    }

    fn known_optimum(&self) -> Option<f64> {
        Some(self.benchmark.spec().f_true)
    }

    fn known_solution(&self) -> Option<Vec<f64>> {
        self.benchmark.x_true(self.dimension)
    }

    fn is_stochastic(&self) -> bool {
        self.benchmark.spec().stochastic
    }
}

/// Objective and search space for a named benchmark.
pub fn make(name: &str, dimension: usize) -> Result<(BenchmarkObjective, SearchSpace)> {
    make_seeded(name, dimension, 0)
}

pub fn make_seeded(name: &str, dimension: usize, seed: u64) -> Result<(BenchmarkObjective, SearchSpace)> {
    let b = Benchmark::from_name(name)?;
    Ok((b.objective(dimension, seed), b.search_space(dimension)?))
}

/// Outcome of [`verify_optimum`].
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub benchmark: Benchmark,
    pub dimension: usize,
    pub value_at_x_true: f64,
    pub samples: usize,
    pub min_sampled: f64,
}

const VERIFY_TOLERANCE: f64 = 1e-10;
const VERIFY_SAMPLES: usize = 100;

/// Checks that a deterministic benchmark attains its tabulated minimum at its
/// tabulated minimizer and that no random in-range point does better.
pub fn verify_optimum<R: Rng + ?Sized>(
    benchmark: Benchmark,
    dimension: usize,
    rng: &mut R,
) -> Result<VerifyReport> {
    let spec = benchmark.spec();
    let mismatch = |detail: String| Error::TranscriptionMismatch {
        function: spec.name.to_string(),
        detail,
    };
    let x_true = benchmark
        .x_true(dimension)
        .ok_or_else(|| mismatch("stochastic function has no checkable minimizer".into()))?;
    let value = benchmark.evaluate(&x_true, None);
    if !((value - spec.f_true).abs() < VERIFY_TOLERANCE) {
        return Err(mismatch(format!(
            "f(x_true) = {value} but f_true = {} (D = {dimension})",
            spec.f_true
        )));
    }
    let (lo, hi) = spec.range;
    let mut min_sampled = f64::INFINITY;
    for _ in 0..VERIFY_SAMPLES {
        let x: Vec<f64> = (0..dimension).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect();
        let v = benchmark.evaluate(&x, None);
        if !(v >= spec.f_true - VERIFY_TOLERANCE) {
            return Err(mismatch(format!("f({x:?}) = {v} is below f_true = {}", spec.f_true)));
        }
        min_sampled = min_sampled.min(v);
    }
    Ok(VerifyReport {
        benchmark,
        dimension,
        value_at_x_true: value,
        samples: VERIFY_SAMPLES,
        min_sampled,
    })
}

/// Runs [`verify_optimum`] for every deterministic benchmark at each dimension.
pub fn verify_suite<R: Rng + ?Sized>(dimensions: &[usize], rng: &mut R) -> Result<Vec<VerifyReport>> {
    let mut reports = Vec::new();
    for b in Benchmark::ALL.into_iter().filter(|b| !b.spec().stochastic) {
        for &d in dimensions {
            reports.push(verify_optimum(b, d, rng)?);
        }
    }
    Ok(reports)
}
