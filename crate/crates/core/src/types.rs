//! Domain types shared by every stage of the optimizer: the search box, the
//! eagle (an evaluated candidate), the objective contract, the run
//! configuration and the run record, plus the single evaluation gate that
//! counts every call to the objective.

use crate::error::{Error, Result};
use crate::local_search::LocalMethod;

/// Axis-aligned box `lower[j] <= x[j] <= upper[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SearchSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::SearchSpace("dimension must be at least 1".into()));
        }
        if lower.len() != upper.len() {
            return Err(Error::SearchSpace(format!(
                "lower has {} entries but upper has {}",
                lower.len(),
                upper.len()
            )));
        }
        for (j, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(Error::SearchSpace(format!(
                    "dimension {j}: need finite lower < upper, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same interval `[lo, hi]` replicated over `dimension` coordinates.
    pub fn uniform(dimension: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dimension], vec![hi; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Smallest side length of the box.
    pub fn min_width(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| hi - lo)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
    }

    /// Component-wise truncation into the box.
    pub fn clamp(&self, x: &mut [f64]) {
        for (v, (lo, hi)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.min(*hi).max(*lo);
        }
    }
}

/// A candidate solution together with its objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct Eagle {
    pub position: Vec<f64>,
    pub value: f64,
}

/// A function to minimize.
///
/// Implementations take `&mut self` so that stochastic objectives can carry
/// their own random source and external objectives their process handle.
pub trait Objective {
    fn evaluate(&mut self, x: &[f64]) -> Result<f64>;

    /// The true minimum value, when known. Enables tolerance-based termination.
    fn known_optimum(&self) -> Option<f64> {
        None
    }

    fn known_solution(&self) -> Option<Vec<f64>> {
        None
    }

    /// Whether repeated evaluation at one point may return different values.
    fn is_stochastic(&self) -> bool {
        false
    }
}

impl<T: Objective + ?Sized> Objective for &mut T {
    fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        (**self).evaluate(x)
    }
    fn known_optimum(&self) -> Option<f64> {
        (**self).known_optimum()
    }
    fn known_solution(&self) -> Option<Vec<f64>> {
        (**self).known_solution()
    }
    fn is_stochastic(&self) -> bool {
        (**self).is_stochastic()
    }
}

impl<T: Objective + ?Sized> Objective for Box<T> {
    fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        (**self).evaluate(x)
    }
    fn known_optimum(&self) -> Option<f64> {
        (**self).known_optimum()
    }
    fn known_solution(&self) -> Option<Vec<f64>> {
        (**self).known_solution()
    }
    fn is_stochastic(&self) -> bool {
        (**self).is_stochastic()
    }
}

/// Adapts a plain closure into an [`Objective`].
pub struct FnObjective<F> {
    f: F,
    optimum: Option<f64>,
}

impl<F: FnMut(&[f64]) -> f64> FnObjective<F> {
    pub fn new(f: F) -> Self {
        Self { f, optimum: None }
    }

    pub fn with_optimum(mut self, f_true: f64) -> Self {
        self.optimum = Some(f_true);
        self
    }
}

impl<F: FnMut(&[f64]) -> f64> Objective for FnObjective<F> {
    fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        Ok((self.f)(x))
    }
    fn known_optimum(&self) -> Option<f64> {
        self.optimum
    }
}

/// `|value - f_true|`.
pub fn function_error(value: f64, f_true: f64) -> f64 {
    (value - f_true).abs()
}

/// One improvement of the best-so-far value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    /// Evaluation count at which the improvement happened (1-based).
    pub evals: u64,
    pub best: f64,
}

/// Counts objective calls against a shared budget and tracks the incumbent.
///
/// Every objective evaluation made by the optimizer (initial population,
/// offspring, local search) goes through [`Evaluator::evaluate`].
pub struct Evaluator<'a> {
    objective: &'a mut dyn Objective,
    max_evals: u64,
    used: u64,
    target: Option<(f64, f64)>,
    best: Option<Eagle>,
    trace: Vec<TracePoint>,
}

impl<'a> Evaluator<'a> {
    pub fn new(objective: &'a mut dyn Objective, max_evals: u64) -> Self {
        Self {
            objective,
            max_evals,
            used: 0,
            target: None,
            best: None,
            trace: Vec::new(),
        }
    }

    /// Enables [`Evaluator::target_reached`]: the incumbent error must be
    /// strictly below `tolerance`.
    pub fn with_target(mut self, f_true: f64, tolerance: f64) -> Self {
        self.target = Some((f_true, tolerance));
        self
    }

    pub fn evaluate(&mut self, position: Vec<f64>) -> Result<Eagle> {
        if self.used >= self.max_evals {
            return Err(Error::BudgetExhausted {
                max_evals: self.max_evals,
            });
        }
        self.used += 1;
        let value = self.objective.evaluate(&position)?;
        if !value.is_finite() {
            return Err(Error::NonFiniteObjective { value, position });
        }
        let eagle = Eagle { position, value };
        if self.best.as_ref().is_none_or(|b| value < b.value) {
            self.best = Some(eagle.clone());
            self.trace.push(TracePoint {
                evals: self.used,
                best: value,
            });
        }
        Ok(eagle)
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn max_evals(&self) -> u64 {
        self.max_evals
    }

    pub fn remaining(&self) -> u64 {
        self.max_evals - self.used
    }

    pub fn exhausted(&self) -> bool {
        self.used >= self.max_evals
    }

    pub fn target_reached(&self) -> bool {
        match (self.target, &self.best) {
            (Some((f_true, tol)), Some(best)) => function_error(best.value, f_true) < tol,
            _ => false,
        }
    }

    /// Budget spent or target reached.
    pub fn should_stop(&self) -> bool {
        self.exhausted() || self.target_reached()
    }

    pub fn best(&self) -> Option<&Eagle> {
        self.best.as_ref()
    }

    pub fn trace(&self) -> &[TracePoint] {
        &self.trace
    }

    pub(crate) fn take_trace(&mut self) -> Vec<TracePoint> {
        std::mem::take(&mut self.trace)
    }
}

/// Every tunable constant of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Initial population size `S0`.
    pub initial_pop_size: usize,
    /// Floor of the linear population size reduction.
    pub min_pop_size: usize,
    /// Evaluation budget of one local search call.
    pub local_budget: usize,
    /// Territory half-width as a fraction of the narrowest side of the box.
    pub territory_fraction: f64,
    /// Archive capacity is `floor(archive_rate * initial_pop_size)`.
    pub archive_rate: f64,
    /// Number of slots in the scaling-factor memory.
    pub memory_size: usize,
    /// Lévy flight exponent.
    pub levy_beta: f64,
    pub max_evals: u64,
    /// Runs stop once `|best - f_true| < target_tolerance` (when `f_true` is known).
    pub target_tolerance: f64,
    pub seed: u64,
    pub local_method: LocalMethod,
}

impl OptimizerConfig {
    /// Defaults scaled to the problem dimension: `S0 = 20 D^2`,
    /// `S_loc = 10 D^2`, `H = 20 D`, budget `10000 D`.
    pub fn for_dimension(dimension: usize) -> Self {
        let d = dimension.max(1);
        Self {
            initial_pop_size: (20 * d * d).max(5),
            min_pop_size: 5,
            local_budget: 10 * d * d,
            territory_fraction: 0.04,
            archive_rate: 2.6,
            memory_size: 20 * d,
            levy_beta: 1.5,
            max_evals: 10_000 * d as u64,
            target_tolerance: 1e-8,
            seed: 0,
            local_method: LocalMethod::default(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_evals(mut self, max_evals: u64) -> Self {
        self.max_evals = max_evals;
        self
    }

    pub fn with_territory_fraction(mut self, rho: f64) -> Self {
        self.territory_fraction = rho;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.target_tolerance = tolerance;
        self
    }

    pub fn archive_capacity(&self) -> usize {
        (self.archive_rate * self.initial_pop_size as f64).floor() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.min_pop_size < 5 {
            return fail(format!(
                "min_pop_size must be at least 5 (Movement draws five eagles), got {}",
                self.min_pop_size
            ));
        }
        if self.initial_pop_size < self.min_pop_size {
            return fail(format!(
                "initial_pop_size {} is below min_pop_size {}",
                self.initial_pop_size, self.min_pop_size
            ));
        }
        if self.local_budget == 0 {
            return fail("local_budget must be positive".into());
        }
        if !(self.territory_fraction > 0.0 && self.territory_fraction < 1.0) {
            return fail(format!(
                "territory_fraction must lie in (0, 1), got {}",
                self.territory_fraction
            ));
        }
        if !(self.archive_rate > 0.0 && self.archive_rate.is_finite()) {
            return fail(format!("archive_rate must be positive, got {}", self.archive_rate));
        }
        if self.memory_size == 0 {
            return fail("memory_size must be positive".into());
        }
        if !(self.levy_beta > 1.0 && self.levy_beta <= 2.0) {
            return fail(format!("levy_beta must lie in (1, 2], got {}", self.levy_beta));
        }
        if self.max_evals < self.initial_pop_size as u64 {
            return fail(format!(
                "max_evals {} cannot cover the initial population of {}",
                self.max_evals, self.initial_pop_size
            ));
        }
        if !(self.target_tolerance >= 0.0) {
            return fail(format!(
                "target_tolerance must be non-negative, got {}",
                self.target_tolerance
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    ToleranceReached,
    BudgetExhausted,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::ToleranceReached => "tolerance",
            Termination::BudgetExhausted => "budget",
        }
    }
}

/// Bookkeeping for one generation of the main loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationRecord {
    pub generation: u64,
    /// Evaluation count when the generation started (used for the size reduction).
    pub evals_at_start: u64,
    pub population_size: usize,
    pub offspring_evals: u64,
    pub local_evals: u64,
    /// Operator probabilities after the update at the end of the generation.
    pub probabilities: [f64; 3],
    pub archive_len: usize,
}

/// Result of one optimizer run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub best_value: f64,
    pub best_position: Vec<f64>,
    pub evals_used: u64,
    pub generations: u64,
    /// Best-so-far value at each improvement, in evaluation order.
    pub trace: Vec<TracePoint>,
    pub terminated_by: Termination,
    pub initial_evals: u64,
    pub generation_log: Vec<GenerationRecord>,
}

impl RunRecord {
    pub fn error(&self, f_true: f64) -> f64 {
        function_error(self.best_value, f_true)
    }
}
