//! The best eagle's territory search.
//!
//! The territory is a box of half-width `max(rho * min side, 1)` around the
//! best eagle, truncated to the search space. Inside it a derivative-free,
//! bound-respecting local minimizer runs on a fixed evaluation budget that is
//! drawn from the run's global budget.

use crate::error::Result;
use crate::types::{Eagle, Evaluator, SearchSpace};

/// Initial simplex edge (or compass step) as a fraction of the territory half-width.
const INITIAL_STEP_FRACTION: f64 = 0.1;
/// Stop once the simplex (or step) is smaller than this fraction of the half-width.
const CONVERGENCE_FRACTION: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Territory {
    pub y_size: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub start: Vec<f64>,
    /// Initial simplex edge or compass step.
    pub initial_step: f64,
}

impl Territory {
    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (v, (lo, hi)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.min(*hi).max(*lo);
        }
    }

    /// Same box, different starting point (clamped into the box).
    pub fn with_start(mut self, mut start: Vec<f64>) -> Self {
        self.clamp(&mut start);
        self.start = start;
        self
    }

    /// Overrides the initial step, keeping it between the convergence
    /// threshold and the default fraction of the half-width.
    pub fn with_initial_step(mut self, step: f64) -> Self {
        let cap = INITIAL_STEP_FRACTION * self.y_size;
        let floor = 1e3 * CONVERGENCE_FRACTION * self.y_size;
        self.initial_step = if step.is_finite() { step.clamp(floor, cap) } else { cap };
        self
    }
}

/// Builds the territory around `best`.
pub fn territory(best: &Eagle, space: &SearchSpace, rho: f64) -> Territory {
    let y_size = (rho * space.min_width()).max(1.0);
    let mut lower: Vec<f64> = best.position.iter().map(|x| x - y_size).collect();
    let mut upper: Vec<f64> = best.position.iter().map(|x| x + y_size).collect();
    space.clamp(&mut lower);
    space.clamp(&mut upper);
    Territory {
        y_size,
        lower,
        upper,
        start: best.position.clone(),
        initial_step: INITIAL_STEP_FRACTION * y_size,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalResult {
    pub best_point: Vec<f64>,
    pub best_value: f64,
    pub evals_consumed: u64,
    /// Simplex diameter or pattern step when the search stopped.
    pub final_step: f64,
}

/// Starting point of the local search: the previous local optimum when the
/// best eagle is unchanged since the last generation, else the best eagle.
/// Also returns the cached value at that point.
pub fn warm_start_rule(
    prev_best: Option<&Eagle>,
    prev_local: Option<&LocalResult>,
    current_best: &Eagle,
) -> (Vec<f64>, f64) {
    match (prev_best, prev_local) {
        (Some(prev), Some(local)) if prev.position == current_best.position => {
            (local.best_point.clone(), local.best_value)
        }
        _ => (current_best.position.clone(), current_best.value),
    }
}

/// Initial step of a local search. A warm-started search resumes at the
/// scale the previous one stopped at, unless that search had converged, in
/// which case it restarts. Cold starts use `spread`, the distance from the
/// best eagle to its nearest neighbour, when there is one.
pub fn initial_step(terr: &Territory, resumed: Option<&LocalResult>, spread: Option<f64>) -> f64 {
    let floor = 1e3 * CONVERGENCE_FRACTION * terr.y_size;
    let cap = INITIAL_STEP_FRACTION * terr.y_size;
    let step = match (resumed, spread) {
        (Some(prev), _) if prev.final_step > floor => prev.final_step,
        (_, Some(d)) if d.is_finite() => d,
        _ => cap,
    };
    step.clamp(floor, cap)
}

/// A bounded local minimizer working through the shared [`Evaluator`].
pub trait LocalMinimizer {
    /// Minimizes from `terr.start` (whose value `start_value` is already
    /// known) using at most `budget` evaluations. The result is never worse
    /// than the start and stays inside the territory.
    fn minimize(
        &self,
        evaluator: &mut Evaluator<'_>,
        terr: &Territory,
        start_value: f64,
        budget: u64,
    ) -> Result<LocalResult>;
}

/// Built-in local minimizers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LocalMethod {
    /// Nelder-Mead with dimension-adaptive coefficients; trial points are
    /// truncated to the territory.
    #[default]
    NelderMead,
    /// Coordinate pattern search that halves its step after an unsuccessful poll.
    Compass,
    /// Hooke-Jeeves: coordinate exploration plus pattern (extrapolation)
    /// moves along successful directions, halving the step on failure.
    HookeJeeves,
}

impl LocalMinimizer for LocalMethod {
    fn minimize(
        &self,
        evaluator: &mut Evaluator<'_>,
        terr: &Territory,
        start_value: f64,
        budget: u64,
    ) -> Result<LocalResult> {
        let mut probe = Probe::new(evaluator, terr, start_value, budget);
        match self {
            LocalMethod::NelderMead => nelder_mead(&mut probe)?,
            LocalMethod::Compass => compass(&mut probe)?,
            LocalMethod::HookeJeeves => hooke_jeeves(&mut probe)?,
        }
        Ok(probe.finish())
    }
}

/// Runs `method` with the budget capped by what remains globally.
pub fn local_minimize(
    method: &dyn LocalMinimizer,
    evaluator: &mut Evaluator<'_>,
    terr: &Territory,
    start_value: f64,
    budget: u64,
) -> Result<LocalResult> {
    let budget = budget.min(evaluator.remaining());
    method.minimize(evaluator, terr, start_value, budget)
}

/// Budgeted objective access that remembers the best point seen.
struct Probe<'e, 'a, 't> {
    evaluator: &'e mut Evaluator<'a>,
    terr: &'t Territory,
    budget: u64,
    used: u64,
    best_point: Vec<f64>,
    best_value: f64,
    scale: f64,
}

impl<'e, 'a, 't> Probe<'e, 'a, 't> {
    fn new(evaluator: &'e mut Evaluator<'a>, terr: &'t Territory, start_value: f64, budget: u64) -> Self {
        Self {
            evaluator,
            terr,
            budget,
            used: 0,
            best_point: terr.start.clone(),
            best_value: start_value,
            scale: terr.initial_step,
        }
    }

    /// `None` once the local or global budget is spent or the target is hit.
    fn eval(&mut self, x: &[f64]) -> Result<Option<f64>> {
        if self.used >= self.budget || self.evaluator.should_stop() {
            return Ok(None);
        }
        self.used += 1;
        let eagle = self.evaluator.evaluate(x.to_vec())?;
        if eagle.value < self.best_value {
            self.best_value = eagle.value;
            self.best_point = eagle.position;
        }
        Ok(Some(eagle.value))
    }

    fn project(&self, mut x: Vec<f64>) -> Vec<f64> {
        self.terr.clamp(&mut x);
        x
    }

    fn tolerance(&self) -> f64 {
        CONVERGENCE_FRACTION * self.terr.y_size
    }

    fn finish(self) -> LocalResult {
        LocalResult {
            best_point: self.best_point,
            best_value: self.best_value,
            evals_consumed: self.used,
            final_step: self.scale,
        }
    }
}

fn nelder_mead(probe: &mut Probe<'_, '_, '_>) -> Result<()> {
    let n = probe.terr.start.len();
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = if n >= 2 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };
    let step = probe.terr.initial_step;
    let tol = probe.tolerance();

    let start = probe.terr.start.clone();
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(start.clone(), probe.best_value)];
    for j in 0..n {
        let mut x = start.clone();
        x[j] = if x[j] + step <= probe.terr.upper[j] {
            x[j] + step
        } else {
            x[j] - step
        };
        let x = probe.project(x);
        let Some(fx) = probe.eval(&x)? else {
            return Ok(());
        };
        simplex.push((x, fx));
    }

    let combine = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(ai, bi)| ai + t * (bi - ai)).collect()
    };

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        probe.scale = diameter;
        if diameter < tol {
            return Ok(());
        }

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / nf;
            }
        }
        let (worst, f_worst) = simplex[n].clone();
        let f_best = simplex[0].1;
        let f_second_worst = simplex[n - 1].1;

        // centroid + alpha (centroid - worst)
        let raw = combine(&centroid, &worst, -alpha);
        let xr = probe.project(raw.clone());
        let truncated = xr != raw;
        let Some(fr) = probe.eval(&xr)? else {
            return Ok(());
        };

        if fr < f_best {
            let xe = probe.project(combine(&centroid, &xr, gamma));
            let Some(fe) = probe.eval(&xe)? else {
                return Ok(());
            };
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < f_second_worst {
            simplex[n] = (xr, fr);
            continue;
        }

        // A reflection cut short by the territory bound would flatten the
        // simplex against it, so contract inside instead.
        let accepted = if fr < f_worst && !truncated {
            let xc = probe.project(combine(&centroid, &xr, rho));
            let Some(fc) = probe.eval(&xc)? else {
                return Ok(());
            };
            (fc <= fr).then_some((xc, fc))
        } else {
            let xc = probe.project(combine(&centroid, &worst, rho));
            let Some(fc) = probe.eval(&xc)? else {
                return Ok(());
            };
            (fc < f_worst).then_some((xc, fc))
        };
        if let Some(vertex) = accepted {
            simplex[n] = vertex;
            continue;
        }

        let anchor = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x = probe.project(combine(&anchor, &vertex.0, sigma));
            let Some(fx) = probe.eval(&x)? else {
                return Ok(());
            };
            *vertex = (x, fx);
        }
    }
}

fn compass(probe: &mut Probe<'_, '_, '_>) -> Result<()> {
    let n = probe.terr.start.len();
    let mut step = probe.terr.initial_step;
    let tol = probe.tolerance();
    let mut x = probe.terr.start.clone();
    let mut fx = probe.best_value;
    while step >= tol {
        let mut improved = false;
        for j in 0..n {
            for sign in [1.0, -1.0] {
                let mut trial = x.clone();
                trial[j] += sign * step;
                let trial = probe.project(trial);
                if trial[j] == x[j] {
                    continue;
                }
                let Some(ft) = probe.eval(&trial)? else {
                    return Ok(());
                };
                if ft < fx {
                    x = trial;
                    fx = ft;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
            probe.scale = step;
        }
    }
    Ok(())
}

/// Polls `+step` then `-step` along each coordinate around `x`, keeping every
/// improvement. `None` when the budget ran out.
fn explore(
    probe: &mut Probe<'_, '_, '_>,
    mut x: Vec<f64>,
    mut fx: f64,
    step: f64,
) -> Result<Option<(Vec<f64>, f64)>> {
    for j in 0..x.len() {
        for sign in [1.0, -1.0] {
            let mut trial = x.clone();
            trial[j] += sign * step;
            let trial = probe.project(trial);
            if trial[j] == x[j] {
                continue;
            }
            let Some(ft) = probe.eval(&trial)? else {
                return Ok(None);
            };
            if ft < fx {
                x = trial;
                fx = ft;
                break;
            }
        }
    }
    Ok(Some((x, fx)))
}

fn hooke_jeeves(probe: &mut Probe<'_, '_, '_>) -> Result<()> {
    let mut step = probe.terr.initial_step;
    let tol = probe.tolerance();
    let mut base = probe.terr.start.clone();
    let mut f_base = probe.best_value;
    while step >= tol {
        let Some((mut x, mut fx)) = explore(probe, base.clone(), f_base, step)? else {
            return Ok(());
        };
        if fx >= f_base {
            step *= 0.5;
            probe.scale = step;
            continue;
        }
        // Extrapolate along the successful direction while it keeps paying off.
        loop {
            let pattern: Vec<f64> = x.iter().zip(&base).map(|(a, b)| 2.0 * a - b).collect();
            base = x;
            f_base = fx;
            let pattern = probe.project(pattern);
            let Some(fp) = probe.eval(&pattern)? else {
                return Ok(());
            };
            let Some((next, f_next)) = explore(probe, pattern, fp, step)? else {
                return Ok(());
            };
            if f_next < f_base {
                x = next;
                fx = f_next;
            } else {
                break;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::FnObjective;

    fn sphere() -> FnObjective<impl FnMut(&[f64]) -> f64> {
        FnObjective::new(|x: &[f64]| x.iter().map(|v| v * v).sum())
    }

    fn eagle(position: Vec<f64>, value: f64) -> Eagle {
        Eagle { position, value }
    }

    #[test]
    fn territory_sizes() {
        let wide = SearchSpace::uniform(3, -100.0, 100.0).unwrap();
        let t = territory(&eagle(vec![0.0; 3], 0.0), &wide, 0.04);
        assert!((t.y_size - 8.0).abs() < 1e-12);
        assert_eq!(t.lower, vec![-8.0; 3]);

        let unit = SearchSpace::uniform(2, 0.0, 1.0).unwrap();
        let t = territory(&eagle(vec![0.3, 0.6], 0.0), &unit, 0.04);
        assert_eq!(t.y_size, 1.0);
        assert_eq!(t.lower, vec![0.0, 0.0]);
        assert_eq!(t.upper, vec![1.0, 1.0]);
    }

    #[test]
    fn territory_clamps_at_corner() {
        let space = SearchSpace::uniform(2, -5.0, 5.0).unwrap();
        let t = territory(&eagle(vec![-5.0, 5.0], 0.0), &space, 0.04);
        assert_eq!(t.lower, vec![-5.0, 4.0]);
        assert_eq!(t.upper, vec![-4.0, 5.0]);
        assert!(t.contains(&t.start));
    }

    #[test]
    fn sphere_converges_within_forty_evaluations() {
        for method in [LocalMethod::NelderMead, LocalMethod::Compass] {
            let mut obj = sphere();
            let mut ev = Evaluator::new(&mut obj, 1000);
            let space = SearchSpace::uniform(2, -1.0, 1.0).unwrap();
            let start = eagle(vec![0.3, -0.2], 0.13);
            let terr = territory(&start, &space, 0.04);
            let r = local_minimize(&method, &mut ev, &terr, start.value, 40).unwrap();
            assert!(r.evals_consumed <= 40);
            assert_eq!(ev.used(), r.evals_consumed);
            assert!(terr.contains(&r.best_point));
            assert!(r.best_value <= start.value);
            if method == LocalMethod::Compass {
                // 0.3 and 0.2 are exact multiples of the halving steps of 0.1
                assert!(r.best_value < 1e-8, "{method:?} reached {}", r.best_value);
            }
        }
    }

    #[test]
    fn quadratic_minimum_located() {
        let c = 0.37;
        let mut obj = FnObjective::new(move |x: &[f64]| (x[0] - c) * (x[0] - c));
        let space = SearchSpace::uniform(1, -2.0, 2.0).unwrap();
        let start = eagle(vec![-0.5], 0.87 * 0.87);
        let terr = territory(&start, &space, 0.04);
        let mut ev = Evaluator::new(&mut obj, 1000);
        let r = local_minimize(&LocalMethod::NelderMead, &mut ev, &terr, start.value, 50).unwrap();
        assert!(r.evals_consumed <= 50);
        assert!((r.best_point[0] - c).abs() < 1e-6, "{:?}", r.best_point);
    }

    #[test]
    fn budget_of_one() {
        let mut obj = sphere();
        let mut ev = Evaluator::new(&mut obj, 100);
        let space = SearchSpace::uniform(2, -1.0, 1.0).unwrap();
        let start = eagle(vec![0.5, 0.5], 0.5);
        let terr = territory(&start, &space, 0.04);
        let r = local_minimize(&LocalMethod::NelderMead, &mut ev, &terr, start.value, 1).unwrap();
        assert_eq!(r.evals_consumed, 1);
        assert_eq!(r.best_point, start.position);
        assert_eq!(r.best_value, 0.5);
    }

    #[test]
    fn stationary_start_stays_put() {
        let mut obj = sphere();
        let mut ev = Evaluator::new(&mut obj, 1000);
        let space = SearchSpace::uniform(2, -1.0, 1.0).unwrap();
        let start = eagle(vec![0.0, 0.0], 0.0);
        let terr = territory(&start, &space, 0.04);
        for method in [LocalMethod::NelderMead, LocalMethod::Compass] {
            let r = local_minimize(&method, &mut ev, &terr, 0.0, 30).unwrap();
            assert_eq!(r.best_value, 0.0);
            assert_eq!(r.best_point, vec![0.0, 0.0]);
        }
    }

    #[test]
    fn global_budget_caps_local_budget() {
        let mut obj = sphere();
        let mut ev = Evaluator::new(&mut obj, 7);
        let space = SearchSpace::uniform(2, -1.0, 1.0).unwrap();
        let start = eagle(vec![0.5, 0.5], 0.5);
        let terr = territory(&start, &space, 0.04);
        let r = local_minimize(&LocalMethod::NelderMead, &mut ev, &terr, 0.5, 40).unwrap();
        assert_eq!(r.evals_consumed, 7);
        assert!(ev.exhausted());
    }

    #[test]
    fn initial_step_rule() {
        let space = SearchSpace::uniform(2, -100.0, 100.0).unwrap();
        let terr = territory(&eagle(vec![0.0, 0.0], 0.0), &space, 0.04);
        assert_eq!(initial_step(&terr, None, None), 0.8);
        assert_eq!(initial_step(&terr, None, Some(0.05)), 0.05);
        assert_eq!(initial_step(&terr, None, Some(5.0)), 0.8);
        assert_eq!(initial_step(&terr, None, Some(0.0)), 8e-9);
        let mut prev = LocalResult {
            best_point: vec![0.0, 0.0],
            best_value: 0.0,
            evals_consumed: 10,
            final_step: 1e-3,
        };
        assert_eq!(initial_step(&terr, Some(&prev), Some(0.05)), 1e-3);
        prev.final_step = 1e-12;
        assert_eq!(initial_step(&terr, Some(&prev), Some(0.05)), 0.05);
    }

    #[test]
    fn warm_start_cases() {
        let best = eagle(vec![1.0, 2.0], 5.0);
        let local = LocalResult {
            best_point: vec![1.1, 1.9],
            best_value: 4.0,
            evals_consumed: 10,
            final_step: 0.01,
        };
        assert_eq!(warm_start_rule(Some(&best), Some(&local), &best), (vec![1.1, 1.9], 4.0));
        let other = eagle(vec![0.0, 2.0], 3.0);
        assert_eq!(warm_start_rule(Some(&best), Some(&local), &other), (vec![0.0, 2.0], 3.0));
        assert_eq!(warm_start_rule(None, None, &best), (vec![1.0, 2.0], 5.0));
    }
}
