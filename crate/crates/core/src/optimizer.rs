//! The main loop: Latin hypercube initialization, then alternating territory
//! search by the best eagle and population evolution by the three operators,
//! until the target error or the evaluation budget is reached.

use crate::adaptation::{improvement_rate, reduce_population_size, ProbabilityVector, ScalingMemory};
use crate::error::{Error, Result};
use crate::local_search::{initial_step, local_minimize, territory, warm_start_rule, LocalResult};
use crate::operators::{
    assign_subpopulations, movement, mutation_one, mutation_two, select_and_archive, Archive,
    Operator, Population,
};
use crate::sampling::{latin_hypercube, seeded, LevyParams, RandomSource};
use crate::types::{
    function_error, Eagle, Evaluator, Objective, OptimizerConfig, RunRecord, SearchSpace,
    Termination,
};

pub use crate::types::GenerationRecord;

/// Everything that evolves during a run.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    pub population: Population,
    pub archive: Archive,
    pub probabilities: ProbabilityVector,
    pub scaling_memory: ScalingMemory,
    pub generation: u64,
    pub prev_best: Option<Eagle>,
    pub prev_local: Option<LocalResult>,
}

/// `true` once the budget is spent or the incumbent error is strictly below tolerance.
pub fn terminate_check(
    evals: u64,
    incumbent: f64,
    config: &OptimizerConfig,
    f_true: Option<f64>,
) -> bool {
    evals >= config.max_evals
        || f_true.is_some_and(|t| function_error(incumbent, t) < config.target_tolerance)
}

/// A configured optimizer. Runs are independent; the same configuration and
/// objective give bit-identical records.
#[derive(Debug, Clone)]
pub struct Optimizer {
    config: OptimizerConfig,
    levy: LevyParams,
}

impl Optimizer {
    pub fn new(config: OptimizerConfig) -> Result<Self> {
        config.validate()?;
        let levy = LevyParams::new(config.levy_beta)?;
        Ok(Self { config, levy })
    }

    pub fn config(&self) -> &OptimizerConfig {
        &self.config
    }

    pub fn run<O: Objective + ?Sized>(&self, objective: &mut O, space: &SearchSpace) -> Result<RunRecord> {
        let f_true = objective.known_optimum();
        let mut objective = objective;
        let mut evaluator = Evaluator::new(&mut objective, self.config.max_evals);
        if let Some(t) = f_true {
            evaluator = evaluator.with_target(t, self.config.target_tolerance);
        }
        let mut run = Run {
            cfg: &self.config,
            levy: &self.levy,
            space,
            f_true,
            rng: seeded(self.config.seed),
            evaluator,
            log: Vec::new(),
            initial_evals: 0,
            generations: 0,
        };
        match run.execute() {
            Ok(()) => Ok(run.record()),
            Err(cause) => Err(Error::Aborted {
                cause: Box::new(cause),
                partial: Box::new(run.record()),
            }),
        }
    }
}

/// Validates `config` and runs one optimization.
pub fn run<O: Objective + ?Sized>(
    objective: &mut O,
    space: &SearchSpace,
    config: &OptimizerConfig,
) -> Result<RunRecord> {
    if space.dimension() == 0 {
        return Err(Error::SearchSpace("empty search space".into()));
    }
    Optimizer::new(config.clone())?.run(objective, space)
}

struct Run<'a, 'o> {
    cfg: &'a OptimizerConfig,
    levy: &'a LevyParams,
    space: &'a SearchSpace,
    f_true: Option<f64>,
    rng: RandomSource,
    evaluator: Evaluator<'o>,
    log: Vec<GenerationRecord>,
    initial_evals: u64,
    generations: u64,
}

impl Run<'_, '_> {
    fn execute(&mut self) -> Result<()> {
        let cfg = self.cfg;
        let points = latin_hypercube(self.space, cfg.initial_pop_size, &mut self.rng);
        let mut eagles = Vec::with_capacity(points.len());
        for p in points {
            eagles.push(self.evaluator.evaluate(p)?);
        }
        self.initial_evals = self.evaluator.used();
        let mut population = Population::new(eagles);
        population.sort();

        let mut state = OptimizerState {
            population,
            archive: Archive::new(cfg.archive_capacity()),
            probabilities: ProbabilityVector::default(),
            scaling_memory: ScalingMemory::new(cfg.memory_size),
            generation: 0,
            prev_best: None,
            prev_local: None,
        };

        self.local_phase(&mut state)?;
        while !self.should_terminate() {
            self.generation(&mut state)?;
        }
        Ok(())
    }

    fn should_terminate(&self) -> bool {
        let incumbent = self.evaluator.best().map_or(f64::INFINITY, |b| b.value);
        terminate_check(self.evaluator.used(), incumbent, self.cfg, self.f_true)
    }

    fn local_phase(&mut self, state: &mut OptimizerState) -> Result<u64> {
        if self.evaluator.should_stop() {
            return Ok(0);
        }
        let best = state.population.get(0).clone();
        let (start, start_value) =
            warm_start_rule(state.prev_best.as_ref(), state.prev_local.as_ref(), &best);
        let warm = state
            .prev_best
            .as_ref()
            .is_some_and(|prev| prev.position == best.position);
        let terr = territory(&best, self.space, self.cfg.territory_fraction).with_start(start);
        let step = initial_step(
            &terr,
            state.prev_local.as_ref().filter(|_| warm),
            state.population.nearest_to(0).map(|(_, d)| d),
        );
        let terr = terr.with_initial_step(step);
        let result = local_minimize(
            &self.cfg.local_method,
            &mut self.evaluator,
            &terr,
            start_value,
            self.cfg.local_budget as u64,
        )?;
        let used = result.evals_consumed;
        state.prev_best = Some(best);
        state.prev_local = Some(result);
        Ok(used)
    }

    fn generation(&mut self, state: &mut OptimizerState) -> Result<()> {
        let cfg = self.cfg;
        state.generation += 1;
        self.generations = state.generation;
        let evals_at_start = self.evaluator.used();

        let size = reduce_population_size(
            cfg.initial_pop_size,
            cfg.min_pop_size,
            evals_at_start,
            cfg.max_evals,
        );
        state.population.truncate(size);
        let pop = &state.population;
        let n = pop.len();

        let assignment = assign_subpopulations(n, state.probabilities.values(), &mut self.rng);
        let best = pop.get(0).position.clone();
        let mean = pop.mean_position();

        let mut candidates = Vec::with_capacity(n);
        for (i, &op) in assignment.operator_of.iter().enumerate() {
            let (f, _slot) = state.scaling_memory.draw(&mut self.rng);
            let position = match op {
                Operator::Movement => {
                    movement(i, pop, &state.archive, f, self.space, &mut self.rng)?.0
                }
                Operator::MutationI => {
                    mutation_one(pop, f, self.levy, self.space, &mut self.rng)?.0
                }
                Operator::MutationII => mutation_two(&best, &mean, f, self.space, &mut self.rng).0,
            };
            candidates.push((position, f));
        }

        let mut offspring = Vec::with_capacity(n);
        for (position, _) in &candidates {
            if self.evaluator.should_stop() {
                break;
            }
            offspring.push(self.evaluator.evaluate(position.clone())?);
        }
        let offspring_evals = offspring.len() as u64;

        let mut old_values: [Vec<f64>; 3] = Default::default();
        let mut new_values: [Vec<f64>; 3] = Default::default();
        let mut successes = Vec::new();
        let mut deltas = Vec::new();
        for (i, child) in offspring.into_iter().enumerate() {
            let parent = state.population.get(i).clone();
            let k = assignment.operator_of[i].index();
            old_values[k].push(parent.value);
            new_values[k].push(child.value);
            let gain = parent.value - child.value;
            let selection = select_and_archive(parent, child, &mut state.archive, &mut self.rng);
            if selection.improved {
                successes.push(candidates[i].1);
                deltas.push(gain);
            }
            state.population.replace(i, selection.survivor);
        }
        state.population.sort();

        let local_evals = self.local_phase(state)?;

        let rates = [0, 1, 2].map(|k| improvement_rate(&old_values[k], &new_values[k]));
        state.probabilities.update(rates);
        state.scaling_memory.lehmer_update(&successes, &deltas);

        self.log.push(GenerationRecord {
            generation: state.generation,
            evals_at_start,
            population_size: n,
            offspring_evals,
            local_evals,
            probabilities: state.probabilities.values(),
            archive_len: state.archive.len(),
        });
        Ok(())
    }

    fn record(&mut self) -> RunRecord {
        let best = self.evaluator.best().cloned();
        let terminated_by = if self.evaluator.target_reached() {
            Termination::ToleranceReached
        } else {
            Termination::BudgetExhausted
        };
        RunRecord {
            best_value: best.as_ref().map_or(f64::INFINITY, |b| b.value),
            best_position: best.map(|b| b.position).unwrap_or_default(),
            evals_used: self.evaluator.used(),
            generations: self.generations,
            trace: self.evaluator.take_trace(),
            terminated_by,
            initial_evals: self.initial_evals,
            generation_log: std::mem::take(&mut self.log),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::FnObjective;

    fn sphere() -> FnObjective<impl FnMut(&[f64]) -> f64> {
        FnObjective::new(|x: &[f64]| x.iter().map(|v| v * v).sum()).with_optimum(0.0)
    }

    #[test]
    fn terminate_rules() {
        let cfg = OptimizerConfig::for_dimension(2);
        assert!(terminate_check(cfg.max_evals, 5.0, &cfg, None));
        assert!(terminate_check(10, 1e-9, &cfg, Some(0.0)));
        assert!(!terminate_check(10, 1e-8, &cfg, Some(0.0)));
        assert!(!terminate_check(10, 1e-9, &cfg, None));
    }

    #[test]
    fn budget_equal_to_initial_population() {
        let mut obj = sphere();
        let space = SearchSpace::uniform(2, -5.12, 5.12).unwrap();
        let cfg = OptimizerConfig::for_dimension(2).with_max_evals(80).with_seed(3);
        let rec = run(&mut obj, &space, &cfg).unwrap();
        assert_eq!(rec.evals_used, 80);
        assert_eq!(rec.generations, 0);
        assert_eq!(rec.initial_evals, 80);
        assert_eq!(rec.terminated_by, Termination::BudgetExhausted);
    }

    #[test]
    fn unknown_optimum_runs_full_budget() {
        let mut obj = FnObjective::new(|x: &[f64]| x.iter().map(|v| v * v).sum());
        let space = SearchSpace::uniform(2, -5.12, 5.12).unwrap();
        let cfg = OptimizerConfig::for_dimension(2).with_max_evals(2_000).with_seed(1);
        let rec = run(&mut obj, &space, &cfg).unwrap();
        assert_eq!(rec.evals_used, 2_000);
        assert_eq!(rec.terminated_by, Termination::BudgetExhausted);
    }

    #[test]
    fn sphere_two_dimensions_reaches_tolerance() {
        let mut obj = sphere();
        let space = SearchSpace::uniform(2, -5.12, 5.12).unwrap();
        let cfg = OptimizerConfig::for_dimension(2).with_seed(42);
        let rec = run(&mut obj, &space, &cfg).unwrap();
        assert_eq!(rec.terminated_by, Termination::ToleranceReached);
        assert!(rec.best_value < 1e-8);
        assert!(rec.evals_used <= cfg.max_evals);
    }

    #[test]
    fn nan_aborts_with_partial_record() {
        let mut calls = 0;
        let mut obj = FnObjective::new(move |x: &[f64]| {
            calls += 1;
            if calls > 100 { f64::NAN } else { x[0] * x[0] }
        });
        let space = SearchSpace::uniform(2, -1.0, 1.0).unwrap();
        let err = run(&mut obj, &space, &OptimizerConfig::for_dimension(2)).unwrap_err();
        assert!(matches!(err.root_cause(), Error::NonFiniteObjective { .. }));
        assert_eq!(err.partial_record().unwrap().evals_used, 101);
    }

    #[test]
    fn invalid_config_is_rejected_before_running() {
        let mut obj = sphere();
        let space = SearchSpace::uniform(2, -1.0, 1.0).unwrap();
        let mut cfg = OptimizerConfig::for_dimension(2);
        cfg.min_pop_size = 3;
        assert!(matches!(run(&mut obj, &space, &cfg), Err(Error::Config(_))));
    }
}
