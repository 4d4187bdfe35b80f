//! Property tests over the building blocks.

use peoa::adaptation::{
    reduce_population_size, update_probabilities, weighted_lehmer_mean, ProbabilityVector,
};
use peoa::operators::{movement, mutation_one, mutation_two, repair_bounds, Archive, Population};
use peoa::sampling::{latin_hypercube, seeded, LevyParams};
use peoa::{Eagle, Evaluator, FnObjective, SearchSpace};
use proptest::prelude::*;

fn space_strategy() -> impl Strategy<Value = SearchSpace> {
    prop::collection::vec((-50.0f64..50.0, 0.1f64..100.0), 1..6).prop_map(|dims| {
        let lower: Vec<f64> = dims.iter().map(|(lo, _)| *lo).collect();
        let upper: Vec<f64> = dims.iter().map(|(lo, w)| lo + w).collect();
        SearchSpace::new(lower, upper).unwrap()
    })
}

fn population(space: &SearchSpace, n: usize, seed: u64) -> Population {
    let mut rng = seeded(seed);
    let eagles = latin_hypercube(space, n, &mut rng)
        .into_iter()
        .map(|position| {
            let value = position.iter().map(|v| v * v).sum();
            Eagle { position, value }
        })
        .collect();
    let mut pop = Population::new(eagles);
    pop.sort();
    pop
}

proptest! {
    #[test]
    fn operators_stay_in_bounds(space in space_strategy(), n in 5usize..30, f in 0.001f64..=1.0, seed in any::<u64>()) {
        let pop = population(&space, n, seed);
        let mut rng = seeded(seed ^ 1);
        let mut archive = Archive::new(2 * n);
        for k in 0..n {
            archive.push(pop.get(k).position.iter().map(|v| v * 0.5).collect(), &mut rng);
        }
        let levy = LevyParams::new(1.5).unwrap();
        let best = pop.get(0).position.clone();
        let mean = pop.mean_position();
        for i in 0..n {
            let (c, _) = movement(i, &pop, &archive, f, &space, &mut rng).unwrap();
            prop_assert!(space.contains(&c));
            let (c, _) = mutation_one(&pop, f, &levy, &space, &mut rng).unwrap();
            prop_assert!(space.contains(&c));
            let (c, x_hat) = mutation_two(&best, &mean, f, &space, &mut rng);
            prop_assert!(space.contains(&c) && space.contains(&x_hat));
        }
    }

    #[test]
    fn repair_lands_inside(space in space_strategy(), raw in prop::collection::vec(-1e6f64..1e6, 6)) {
        let candidate: Vec<f64> = raw.into_iter().take(space.dimension()).collect();
        prop_assume!(candidate.len() == space.dimension());
        prop_assert!(space.contains(&repair_bounds(candidate, &space)));
    }

    #[test]
    fn probabilities_bounded_and_scale_free(rates in prop::array::uniform3(0.0f64..10.0), c in 0.01f64..100.0) {
        let p = update_probabilities(ProbabilityVector::default(), rates);
        prop_assert!(p.values().iter().all(|v| (0.1..=0.9).contains(v)));
        let scaled = update_probabilities(ProbabilityVector::default(), rates.map(|r| r * c));
        for (a, b) in p.values().iter().zip(scaled.values()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn size_is_monotone(s0 in 5usize..2000, extra in 0usize..1000, max_evals in 1u64..1_000_000, a in 0u64..2_000_000, b in 0u64..2_000_000) {
        let s_min = 5;
        let s0 = s0.max(s_min) + extra;
        let (lo, hi) = (a.min(b), a.max(b));
        let early = reduce_population_size(s0, s_min, lo, max_evals);
        let late = reduce_population_size(s0, s_min, hi, max_evals);
        prop_assert!(late <= early);
        prop_assert!((s_min..=s0).contains(&early));
    }

    #[test]
    fn lehmer_mean_within_range(pairs in prop::collection::vec((0.001f64..=1.0, 0.0f64..50.0), 1..20)) {
        let (factors, deltas): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        prop_assume!(deltas.iter().sum::<f64>() > 0.0);
        let m = weighted_lehmer_mean(&factors, &deltas).unwrap();
        let lo = factors.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = factors.iter().cloned().fold(0.0, f64::max);
        prop_assert!(m >= lo * (1.0 - 1e-12) && m <= hi * (1.0 + 1e-12));
    }

    #[test]
    fn archive_never_overflows(capacity in 1usize..40, pushes in 0usize..200, seed in any::<u64>()) {
        let mut archive = Archive::new(capacity);
        let mut rng = seeded(seed);
        for k in 0..pushes {
            archive.push(vec![k as f64], &mut rng);
            prop_assert!(archive.len() <= capacity);
        }
        prop_assert_eq!(archive.len(), pushes.min(capacity));
    }

    #[test]
    fn latin_hypercube_strata(space in space_strategy(), n in 1usize..50, seed in any::<u64>()) {
        let points = latin_hypercube(&space, n, &mut seeded(seed));
        prop_assert_eq!(points.len(), n);
        for j in 0..space.dimension() {
            let (lo, hi) = (space.lower()[j], space.upper()[j]);
            let mut seen = vec![false; n];
            for p in &points {
                let k = (((p[j] - lo) / (hi - lo)) * n as f64).floor() as usize;
                seen[k.min(n - 1)] = true;
            }
            prop_assert!(seen.iter().all(|s| *s));
        }
    }

    #[test]
    fn evaluator_respects_budget(budget in 1u64..50, attempts in 0u64..80) {
        let mut f = FnObjective::new(|x: &[f64]| x[0]);
        let mut ev = Evaluator::new(&mut f, budget);
        let mut ok = 0;
        for k in 0..attempts {
            if ev.evaluate(vec![k as f64]).is_ok() {
                ok += 1;
            }
        }
        prop_assert_eq!(ok, attempts.min(budget));
        prop_assert!(ev.used() <= budget);
    }
}
