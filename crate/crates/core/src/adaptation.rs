//! Parameter control: linear population size reduction, improvement-rate
//! driven operator probabilities, and the success-history memory that feeds
//! the Cauchy-distributed scaling factors.

use rand::Rng;

use crate::sampling::cauchy_draw;

/// Scale of the Cauchy distribution scaling factors are drawn from.
pub const SCALING_CAUCHY_SCALE: f64 = 0.1;
/// Initial value of every scaling memory slot.
pub const SCALING_MEMORY_INIT: f64 = 0.2;
const MAX_REGENERATIONS: usize = 100;

/// `round(S0 + (S_min - S0) * N / N_max)`, rounding halves away from zero.
pub fn reduce_population_size(s0: usize, s_min: usize, evals: u64, max_evals: u64) -> usize {
    let frac = evals.min(max_evals) as f64 / max_evals as f64;
    let size = s0 as f64 + (s_min as f64 - s0 as f64) * frac;
    (size.round() as usize).clamp(s_min, s0)
}

/// Relative improvement an operator achieved over its subpopulation:
/// `Σ max(0, old - new) / Σ old`. Empty subpopulations and non-positive or
/// non-finite denominators give 0.
pub fn improvement_rate(old_values: &[f64], new_values: &[f64]) -> f64 {
    debug_assert_eq!(old_values.len(), new_values.len());
    let gain: f64 = old_values
        .iter()
        .zip(new_values)
        .map(|(o, n)| (o - n).max(0.0))
        .sum();
    let base: f64 = old_values.iter().sum();
    if old_values.is_empty() || !(base > 0.0) || !base.is_finite() {
        return 0.0;
    }
    gain / base
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityVector {
    p: [f64; 3],
}

impl Default for ProbabilityVector {
    fn default() -> Self {
        Self { p: [1.0 / 3.0; 3] }
    }
}

impl ProbabilityVector {
    pub fn values(&self) -> [f64; 3] {
        self.p
    }

    /// `P_i = max(0.1, min(0.9, R_i / ΣR))`. All-zero rates keep the current values.
    pub fn update(&mut self, rates: [f64; 3]) {
        let total: f64 = rates.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return;
        }
        for (p, r) in self.p.iter_mut().zip(rates) {
            *p = (r / total).clamp(0.1, 0.9);
        }
    }
}

/// Functional form of [`ProbabilityVector::update`].
pub fn update_probabilities(previous: ProbabilityVector, rates: [f64; 3]) -> ProbabilityVector {
    let mut next = previous;
    next.update(rates);
    next
}

/// Weighted Lehmer mean `Σ w F² / Σ w F` with `w_k = Δf_k / Σ Δf`.
/// `None` when the weights or the denominator vanish.
pub fn weighted_lehmer_mean(factors: &[f64], deltas: &[f64]) -> Option<f64> {
    let total: f64 = deltas.iter().sum();
    if factors.is_empty() || !(total > 0.0) {
        return None;
    }
    let (num, den) = factors
        .iter()
        .zip(deltas)
        .fold((0.0, 0.0), |(num, den), (f, d)| {
            let w = d / total;
            (num + w * f * f, den + w * f)
        });
    (den > 0.0).then(|| num / den)
}

/// Circular memory of scaling-factor locations.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingMemory {
    means: Vec<f64>,
    cursor: usize,
}

impl ScalingMemory {
    pub fn new(size: usize) -> Self {
        assert!(size > 0, "memory size must be positive");
        Self {
            means: vec![SCALING_MEMORY_INIT; size],
            cursor: 0,
        }
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    /// Draws a scaling factor in (0, 1] from a uniformly chosen slot.
    /// Returns the factor and the slot index.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, usize) {
        let slot = rng.random_range(0..self.means.len());
        let mu = self.means[slot];
        let f = resolve_scaling_factor(mu, || cauchy_draw(mu, SCALING_CAUCHY_SCALE, rng));
        (f, slot)
    }

    /// Overwrites the slot under the cursor with the weighted Lehmer mean of
    /// the successful factors and advances the cursor. No-op without successes.
    pub fn lehmer_update(&mut self, successes: &[f64], deltas: &[f64]) {
        debug_assert_eq!(successes.len(), deltas.len());
        if let Some(mean) = weighted_lehmer_mean(successes, deltas) {
            self.means[self.cursor] = mean.min(1.0);
            self.cursor = (self.cursor + 1) % self.means.len();
        }
    }
}

/// Regenerates non-positive draws and truncates draws at or above 1.
/// After 100 failed regenerations, falls back to the slot mean.
pub fn resolve_scaling_factor(mu: f64, mut sample: impl FnMut() -> f64) -> f64 {
    for _ in 0..MAX_REGENERATIONS {
        let f = sample();
        if f > 0.0 {
            return f.min(1.0);
        }
    }
    log::warn!("scaling factor regeneration cap hit for memory mean {mu}");
    if mu > 0.0 {
        mu.min(1.0)
    } else {
        SCALING_MEMORY_INIT
    }
}
