//! Global-phase operators: Movement, Mutation I, Mutation II, offspring
//! selection with the external archive, and bound repair.

use rand::Rng;

use crate::error::{Error, Result};
use crate::sampling::{levy_step, LevyParams};
use crate::types::{Eagle, SearchSpace};

/// The current generation, sorted ascending by value once [`Population::sort`]
/// has run; index 0 is then the best eagle.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Population {
    eagles: Vec<Eagle>,
}

impl Population {
    pub fn new(eagles: Vec<Eagle>) -> Self {
        Self { eagles }
    }

    pub fn len(&self) -> usize {
        self.eagles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eagles.is_empty()
    }

    pub fn eagles(&self) -> &[Eagle] {
        &self.eagles
    }

    pub fn get(&self, i: usize) -> &Eagle {
        &self.eagles[i]
    }

    /// Stable ascending sort by objective value.
    pub fn sort(&mut self) {
        self.eagles.sort_by(|a, b| a.value.total_cmp(&b.value));
    }

    pub fn best(&self) -> Option<&Eagle> {
        self.eagles.first()
    }

    /// Drops the worst eagles (the tail of the sorted population).
    pub fn truncate(&mut self, size: usize) {
        self.eagles.truncate(size);
    }

    pub fn replace(&mut self, i: usize, eagle: Eagle) {
        self.eagles[i] = eagle;
    }

    pub fn mean_position(&self) -> Vec<f64> {
        let d = self.eagles.first().map_or(0, |e| e.position.len());
        let mut mean = vec![0.0; d];
        for e in &self.eagles {
            for (m, x) in mean.iter_mut().zip(&e.position) {
                *m += x;
            }
        }
        let n = self.eagles.len() as f64;
        mean.iter_mut().for_each(|m| *m /= n);
        mean
    }

    /// Index of the eagle closest to eagle `i` (Euclidean), excluding `i`
    /// itself; ties go to the lowest index. Returns the index and the distance.
    pub fn nearest_to(&self, i: usize) -> Option<(usize, f64)> {
        let xi = &self.eagles[i].position;
        let mut best: Option<(usize, f64)> = None;
        for (k, e) in self.eagles.iter().enumerate() {
            if k == i {
                continue;
            }
            let d2: f64 = e
                .position
                .iter()
                .zip(xi)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if best.is_none_or(|(_, b)| d2 < b) {
                best = Some((k, d2));
            }
        }
        best.map(|(k, d2)| (k, d2.sqrt()))
    }

    pub fn into_eagles(self) -> Vec<Eagle> {
        self.eagles
    }
}

/// Positions of parents that lost to their offspring.
#[derive(Debug, Clone, PartialEq)]
pub struct Archive {
    entries: Vec<Vec<f64>>,
    capacity: usize,
}

impl Archive {
    pub fn new(capacity: usize) -> Self {
        Self {
            entries: Vec::with_capacity(capacity),
            capacity,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    /// Adds a position, then evicts uniformly random entries while over capacity.
    pub fn push<R: Rng + ?Sized>(&mut self, position: Vec<f64>, rng: &mut R) {
        self.entries.push(position);
        while self.entries.len() > self.capacity {
            let k = rng.random_range(0..self.entries.len());
            self.entries.swap_remove(k);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operator {
    Movement,
    MutationI,
    MutationII,
}

impl Operator {
    pub const ALL: [Operator; 3] = [Operator::Movement, Operator::MutationI, Operator::MutationII];

    pub fn index(self) -> usize {
        match self {
            Operator::Movement => 0,
            Operator::MutationI => 1,
            Operator::MutationII => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubpopulationAssignment {
    pub operator_of: Vec<Operator>,
    pub sizes: [usize; 3],
}

/// Operator for one uniform draw `j`, given unnormalized probabilities.
pub fn operator_for_draw(probabilities: [f64; 3], j: f64) -> Operator {
    let total: f64 = probabilities.iter().sum();
    let p1 = probabilities[0] / total;
    let p2 = probabilities[1] / total;
    if j <= p1 {
        Operator::Movement
    } else if j <= p1 + p2 {
        Operator::MutationI
    } else {
        Operator::MutationII
    }
}

/// Splits the population over the three operators by independent uniform draws.
pub fn assign_subpopulations<R: Rng + ?Sized>(
    size: usize,
    probabilities: [f64; 3],
    rng: &mut R,
) -> SubpopulationAssignment {
    let mut sizes = [0; 3];
    let operator_of = (0..size)
        .map(|_| {
            let op = operator_for_draw(probabilities, rng.random::<f64>());
            sizes[op.index()] += 1;
            op
        })
        .collect();
    SubpopulationAssignment { operator_of, sizes }
}

pub fn repair_bounds(mut candidate: Vec<f64>, space: &SearchSpace) -> Vec<f64> {
    space.clamp(&mut candidate);
    candidate
}

/// `x_i + F (best - x_i + r1 - arc + exp(-d^2) (near - x_i))`, before repair.
pub fn movement_formula(
    x_i: &[f64],
    best: &[f64],
    r1: &[f64],
    arc: &[f64],
    near: &[f64],
    distance: f64,
    f: f64,
) -> Vec<f64> {
    let attraction = (-distance * distance).exp();
    (0..x_i.len())
        .map(|j| {
            x_i[j] + f * (best[j] - x_i[j] + r1[j] - arc[j] + attraction * (near[j] - x_i[j]))
        })
        .collect()
}

/// `F (r1 + best - r2) + scale ⊙ levy`, before repair.
pub fn mutation_one_formula(
    r1: &[f64],
    best: &[f64],
    r2: &[f64],
    scale: &[f64],
    levy: &[f64],
    f: f64,
) -> Vec<f64> {
    (0..r1.len())
        .map(|j| f * (r1[j] + best[j] - r2[j]) + scale[j] * levy[j])
        .collect()
}

/// `F (x_hat + best - mean)`, before repair.
pub fn mutation_two_formula(x_hat: &[f64], best: &[f64], mean: &[f64], f: f64) -> Vec<f64> {
    (0..x_hat.len())
        .map(|j| f * (x_hat[j] + best[j] - mean[j]))
        .collect()
}

/// Where an [`ArchivePick`] came from in the population-archive union.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArchivePick {
    Population(usize),
    Archive(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MovementDraw {
    pub r1: usize,
    pub arc: ArchivePick,
    pub near: usize,
    pub distance: f64,
}

/// Movement operator for eagle `i` of a sorted population.
///
/// `r1` is uniform over the population minus the best eagle; `arc` is uniform
/// over the union of population and archive minus the best eagle and `r1`
/// (the population alone while the archive is empty); `near` is the closest
/// other eagle to `i`.
pub fn movement<R: Rng + ?Sized>(
    i: usize,
    pop: &Population,
    archive: &Archive,
    f: f64,
    space: &SearchSpace,
    rng: &mut R,
) -> Result<(Vec<f64>, MovementDraw)> {
    let n = pop.len();
    if n < 3 {
        return Err(Error::InsufficientPopulation {
            needed: 3,
            available: n,
        });
    }
    let r1 = rng.random_range(1..n);
    // Union indices: [0, n) population, [n, n + archive) archive. Skip 0 and r1.
    let union_len = n + archive.len();
    let arc_index = loop {
        let k = rng.random_range(1..union_len);
        if k != r1 {
            break k;
        }
    };
    let (arc_pos, arc) = if arc_index < n {
        (&pop.get(arc_index).position, ArchivePick::Population(arc_index))
    } else {
        let k = arc_index - n;
        (&archive.entries()[k], ArchivePick::Archive(k))
    };
    let (near, distance) = pop.nearest_to(i).expect("population has other eagles");
    let candidate = movement_formula(
        &pop.get(i).position,
        &pop.get(0).position,
        &pop.get(r1).position,
        arc_pos,
        &pop.get(near).position,
        distance,
        f,
    );
    Ok((
        repair_bounds(candidate, space),
        MovementDraw {
            r1,
            arc,
            near,
            distance,
        },
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MutationOneDraw {
    pub r1: usize,
    pub r2: usize,
    pub scale: Vec<f64>,
    pub levy: Vec<f64>,
}

/// Mutation I: two distinct non-best donors plus a scaled Lévy flight.
pub fn mutation_one<R: Rng + ?Sized>(
    pop: &Population,
    f: f64,
    levy: &LevyParams,
    space: &SearchSpace,
    rng: &mut R,
) -> Result<(Vec<f64>, MutationOneDraw)> {
    let n = pop.len();
    if n < 3 {
        return Err(Error::InsufficientPopulation {
            needed: 3,
            available: n,
        });
    }
    let r1 = rng.random_range(1..n);
    let r2 = loop {
        let k = rng.random_range(1..n);
        if k != r1 {
            break k;
        }
    };
    let d = space.dimension();
    let scale: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
    let step = levy_step(d, levy, rng);
    let candidate = mutation_one_formula(
        &pop.get(r1).position,
        &pop.get(0).position,
        &pop.get(r2).position,
        &scale,
        &step,
        f,
    );
    Ok((
        repair_bounds(candidate, space),
        MutationOneDraw {
            r1,
            r2,
            scale,
            levy: step,
        },
    ))
}

/// A uniform random point of the box.
pub fn random_point<R: Rng + ?Sized>(space: &SearchSpace, rng: &mut R) -> Vec<f64> {
    space
        .lower()
        .iter()
        .zip(space.upper())
        .map(|(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
        .collect()
}

/// Mutation II around a fresh random point. `mean` is the population mean,
/// computed once per generation by the caller. Returns the candidate and the
/// random point used.
pub fn mutation_two<R: Rng + ?Sized>(
    best: &[f64],
    mean: &[f64],
    f: f64,
    space: &SearchSpace,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    let x_hat = random_point(space, rng);
    let candidate = mutation_two_formula(&x_hat, best, mean, f);
    (repair_bounds(candidate, space), x_hat)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub survivor: Eagle,
    /// Offspring strictly better than its parent.
    pub improved: bool,
}

/// Greedy one-to-one survival. Ties favour the offspring; only parents that
/// lose strictly are archived.
pub fn select_and_archive<R: Rng + ?Sized>(
    parent: Eagle,
    offspring: Eagle,
    archive: &mut Archive,
    rng: &mut R,
) -> Selection {
    if offspring.value < parent.value {
        archive.push(parent.position, rng);
        Selection {
            survivor: offspring,
            improved: true,
        }
    } else if offspring.value == parent.value {
        Selection {
            survivor: offspring,
            improved: false,
        }
    } else {
        Selection {
            survivor: parent,
            improved: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::seeded;

    fn eagle(position: Vec<f64>, value: f64) -> Eagle {
        Eagle { position, value }
    }

    fn line_population(xs: &[f64]) -> Population {
        let mut p = Population::new(xs.iter().map(|&x| eagle(vec![x], x * x)).collect());
        p.sort();
        p
    }

    #[test]
    fn assignment_thresholds() {
        let third = [1.0 / 3.0; 3];
        assert_eq!(operator_for_draw(third, 0.5), Operator::MutationI);
        assert_eq!(operator_for_draw(third, 0.2), Operator::Movement);
        assert_eq!(operator_for_draw(third, 0.9), Operator::MutationII);
        let skewed = [0.9, 0.1, 0.1];
        assert_eq!(operator_for_draw(skewed, 0.05), Operator::Movement);
        // cumulative thresholds 9/11 and 10/11
        assert_eq!(operator_for_draw(skewed, 0.85), Operator::MutationI);
        assert_eq!(operator_for_draw(skewed, 0.95), Operator::MutationII);
    }

    #[test]
    fn assignment_partitions_population() {
        let a = assign_subpopulations(1000, [0.5, 0.3, 0.2], &mut seeded(1));
        assert_eq!(a.sizes.iter().sum::<usize>(), 1000);
        assert_eq!(a.operator_of.len(), 1000);
        assert!(a.sizes.iter().all(|&s| s > 100));
    }

    #[test]
    fn repair_clamps() {
        let s = SearchSpace::uniform(2, -1.0, 1.0).unwrap();
        assert_eq!(repair_bounds(vec![2.0, -3.0], &s), vec![1.0, -1.0]);
        assert_eq!(repair_bounds(vec![0.3, -0.2], &s), vec![0.3, -0.2]);
        assert_eq!(repair_bounds(vec![1.0, -1.0], &s), vec![1.0, -1.0]);
    }

    #[test]
    fn movement_by_hand() {
        let got = movement_formula(&[0.0], &[1.0], &[2.0], &[0.5], &[0.2], 0.2, 0.5);
        assert!((got[0] - 1.346_078_943_915_232_3).abs() < 1e-12);
    }

    #[test]
    fn movement_cancellations() {
        let x = [0.3, -0.4];
        let near = [0.5, 0.0];
        let d = 0.5f64.hypot(0.4);
        let got = movement_formula(&x, &x, &[1.0, 1.0], &[1.0, 1.0], &near, 0.2, 0.7);
        let w = (-0.04f64).exp();
        assert!((got[0] - (0.3 + 0.7 * w * 0.2)).abs() < 1e-15);
        assert!((got[1] - (-0.4 + 0.7 * w * 0.4)).abs() < 1e-15);
        let still = movement_formula(&x, &[9.0, 9.0], &[1.0, 2.0], &[3.0, 4.0], &near, d, 0.0);
        assert_eq!(still, x.to_vec());
    }

    #[test]
    fn mutation_one_by_hand() {
        let got = mutation_one_formula(&[2.0], &[1.0], &[0.5], &[0.5], &[0.01], 0.6);
        assert!((got[0] - 1.505).abs() < 1e-12);
        let no_levy = mutation_one_formula(&[2.0, 1.0], &[1.0, 1.0], &[0.5, 3.0], &[0.4, 0.9], &[0.0, 0.0], 1.0);
        assert_eq!(no_levy, vec![2.5, -1.0]);
    }

    #[test]
    fn mutation_two_by_hand() {
        assert_eq!(mutation_two_formula(&[3.0], &[1.0], &[2.0], 0.5), vec![1.0]);
        assert_eq!(mutation_two_formula(&[0.7, 0.2], &[1.0, 1.0], &[0.7, 0.2], 1.0), vec![1.0, 1.0]);
        // identical population: mean equals best
        assert_eq!(mutation_two_formula(&[0.7, -2.0], &[1.0, 3.0], &[1.0, 3.0], 0.5), vec![0.35, -1.0]);
    }

    #[test]
    fn nearest_excludes_self_and_breaks_ties_low() {
        let p = Population::new(vec![
            eagle(vec![0.0], 0.0),
            eagle(vec![1.0], 1.0),
            eagle(vec![2.0], 2.0),
            eagle(vec![1.0], 3.0),
        ]);
        assert_eq!(p.nearest_to(1), Some((3, 0.0)));
        assert_eq!(p.nearest_to(2), Some((1, 1.0)));
        assert_eq!(p.nearest_to(0), Some((1, 1.0)));
    }

    #[test]
    fn movement_picks_are_distinct() {
        let pop = line_population(&[0.0, 1.0, -2.0, 3.0, 4.0, -5.0]);
        let mut archive = Archive::new(10);
        let mut rng = seeded(8);
        archive.push(vec![7.0], &mut rng);
        archive.push(vec![8.0], &mut rng);
        let space = SearchSpace::uniform(1, -10.0, 10.0).unwrap();
        let mut saw_archive = false;
        for t in 0..10_000 {
            let i = t % pop.len();
            let (_, draw) = movement(i, &pop, &archive, 0.5, &space, &mut rng).unwrap();
            assert_ne!(draw.r1, 0);
            match draw.arc {
                ArchivePick::Population(k) => {
                    assert_ne!(k, 0);
                    assert_ne!(k, draw.r1);
                }
                ArchivePick::Archive(_) => saw_archive = true,
            }
            assert_ne!(draw.near, i);
        }
        assert!(saw_archive);
    }

    #[test]
    fn mutation_one_picks_are_distinct() {
        let pop = line_population(&[0.0, 1.0, -2.0]);
        let space = SearchSpace::uniform(1, -10.0, 10.0).unwrap();
        let levy = LevyParams::new(1.5).unwrap();
        let mut rng = seeded(4);
        for _ in 0..10_000 {
            let (_, d) = mutation_one(&pop, 0.5, &levy, &space, &mut rng).unwrap();
            assert!(d.r1 != d.r2 && d.r1 != 0 && d.r2 != 0);
        }
    }

    #[test]
    fn small_populations_are_rejected() {
        let pop = line_population(&[0.0, 1.0]);
        let space = SearchSpace::uniform(1, -10.0, 10.0).unwrap();
        let levy = LevyParams::new(1.5).unwrap();
        let mut rng = seeded(0);
        assert!(matches!(
            movement(0, &pop, &Archive::new(5), 0.5, &space, &mut rng),
            Err(Error::InsufficientPopulation { .. })
        ));
        assert!(mutation_one(&pop, 0.5, &levy, &space, &mut rng).is_err());
    }

    #[test]
    fn selection_rules() {
        let mut archive = Archive::new(4);
        let mut rng = seeded(0);
        let s = select_and_archive(eagle(vec![1.0], 5.0), eagle(vec![2.0], 3.0), &mut archive, &mut rng);
        assert_eq!(s.survivor.value, 3.0);
        assert!(s.improved);
        assert_eq!(archive.entries(), &[vec![1.0]]);

        let s = select_and_archive(eagle(vec![1.0], 3.0), eagle(vec![2.0], 5.0), &mut archive, &mut rng);
        assert_eq!(s.survivor.value, 3.0);
        assert_eq!(s.survivor.position, vec![1.0]);
        assert_eq!(archive.len(), 1);

        let s = select_and_archive(eagle(vec![1.0], 3.0), eagle(vec![2.0], 3.0), &mut archive, &mut rng);
        assert_eq!(s.survivor.position, vec![2.0]);
        assert!(!s.improved);
        assert_eq!(archive.len(), 1);
    }

    #[test]
    fn archive_evicts_to_capacity() {
        let mut archive = Archive::new(3);
        let mut rng = seeded(2);
        for k in 0..50 {
            archive.push(vec![k as f64], &mut rng);
            assert!(archive.len() <= 3);
        }
        assert_eq!(archive.len(), 3);
    }
}
