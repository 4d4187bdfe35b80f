//! Seedable random sources and the random draws the optimizer needs:
//! Latin hypercube initialization, Lévy flight steps and Cauchy variates.
//!
//! The generator is ChaCha with 8 rounds (`rand_chacha` 0.9, seeded through
//! `SeedableRng::seed_from_u64`). Golden tests depend on this choice; changing
//! it changes every seeded result.

use std::f64::consts::PI;

use rand::distr::{Distribution, Open01};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::types::SearchSpace;

pub type RandomSource = ChaCha8Rng;

pub fn seeded(seed: u64) -> RandomSource {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An independent stream derived from `seed`. Stream 0 equals [`seeded`].
pub fn fork(seed: u64, stream: u64) -> RandomSource {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `n` points of a classic Latin hypercube design over `space`.
///
/// Each dimension is cut into `n` equal strata; every stratum receives exactly
/// one point, placed uniformly inside it, and the stratum order is an
/// independent random permutation per dimension. Points lie strictly inside
/// the box.
pub fn latin_hypercube<R: Rng + ?Sized>(space: &SearchSpace, n: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let d = space.dimension();
    let mut points = vec![vec![0.0; d]; n];
    let mut strata: Vec<usize> = (0..n).collect();
    for j in 0..d {
        let lo = space.lower()[j];
        let hi = space.upper()[j];
        let width = hi - lo;
        strata.shuffle(rng);
        for (point, &k) in points.iter_mut().zip(&strata) {
            point[j] = loop {
                let u: f64 = Open01.sample(rng);
                let x = lo + width * ((k as f64 + u) / n as f64);
                if lo < x && x < hi {
                    break x;
                }
            };
        }
    }
    points
}

/// Scale constant of Mantegna's Lévy flight generator:
/// `(Γ(1+β) sin(πβ/2) / (β Γ((1+β)/2) 2^((β-1)/2)))^(1/β)`.
pub fn levy_sigma(beta: f64) -> Result<f64> {
    if !(beta > 1.0 && beta <= 2.0) {
        return Err(Error::Domain(format!("levy beta must lie in (1, 2], got {beta}")));
    }
    Ok(levy_sigma_unchecked(beta))
}

fn levy_sigma_unchecked(beta: f64) -> f64 {
    // sin(πβ/2) written as sin(π(2-β)/2) so that β = 2 gives exactly 0.
    let num = gamma(1.0 + beta) * (PI * (2.0 - beta) / 2.0).sin();
    let den = beta * gamma((1.0 + beta) / 2.0) * 2f64.powf((beta - 1.0) / 2.0);
    (num / den).powf(1.0 / beta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevyParams {
    beta: f64,
    sigma: f64,
}

impl LevyParams {
    pub fn new(beta: f64) -> Result<Self> {
        Ok(Self {
            beta,
            sigma: levy_sigma(beta)?,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// One Lévy flight component from two standard normal draws.
pub fn levy_component(u: f64, v: f64, params: &LevyParams) -> f64 {
    0.01 * u * params.sigma / v.abs().powf(1.0 / params.beta)
}

/// A `d`-vector of independent Lévy flight components.
pub fn levy_step<R: Rng + ?Sized>(d: usize, params: &LevyParams, rng: &mut R) -> Vec<f64> {
    (0..d)
        .map(|_| loop {
            let u: f64 = StandardNormal.sample(rng);
            let v: f64 = StandardNormal.sample(rng);
            if v != 0.0 {
                break levy_component(u, v, params);
            }
        })
        .collect()
}

/// Inverse-CDF Cauchy variate for a given uniform `u` in (0, 1).
pub fn cauchy_from_uniform(location: f64, scale: f64, u: f64) -> f64 {
    location + scale * (PI * (u - 0.5)).tan()
}

pub fn cauchy_draw<R: Rng + ?Sized>(location: f64, scale: f64, rng: &mut R) -> f64 {
    let u: f64 = Open01.sample(rng);
    cauchy_from_uniform(location, scale, u)
}

#[cfg(test)]
mod tests {
    use super::*;

    // 40-digit reference from an arbitrary-precision Gamma evaluation.
    const SIGMA_1_5: f64 = 0.696_574_502_557_696_8;

    fn stratum(x: f64, lo: f64, hi: f64, n: usize) -> usize {
        (((x - lo) / (hi - lo)) * n as f64).floor() as usize
    }

    #[test]
    fn lhs_two_points_split_unit_interval() {
        let space = SearchSpace::uniform(1, 0.0, 1.0).unwrap();
        for seed in 0..50 {
            let pts = latin_hypercube(&space, 2, &mut seeded(seed));
            let mut s: Vec<usize> = pts.iter().map(|p| stratum(p[0], 0.0, 1.0, 2)).collect();
            s.sort();
            assert_eq!(s, vec![0, 1]);
        }
    }

    #[test]
    fn lhs_four_points_fill_quarters() {
        let space = SearchSpace::uniform(2, -5.0, 5.0).unwrap();
        let pts = latin_hypercube(&space, 4, &mut seeded(3));
        for j in 0..2 {
            let mut s: Vec<usize> = pts.iter().map(|p| stratum(p[j], -5.0, 5.0, 4)).collect();
            s.sort();
            assert_eq!(s, vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn lhs_hundred_points_empirical_cdf() {
        let space = SearchSpace::uniform(3, 0.0, 1.0).unwrap();
        let pts = latin_hypercube(&space, 100, &mut seeded(11));
        for j in 0..3 {
            let mut col: Vec<f64> = pts.iter().map(|p| p[j]).collect();
            col.sort_by(|a, b| a.partial_cmp(b).unwrap());
            // The k-th order statistic sits in stratum k, so the empirical CDF
            // never strays more than one stratum from the uniform CDF.
            let max_dev = col
                .iter()
                .enumerate()
                .map(|(k, &x)| {
                    let lo = (x - k as f64 / 100.0).abs();
                    let hi = (x - (k + 1) as f64 / 100.0).abs();
                    lo.max(hi)
                })
                .fold(0.0, f64::max);
            assert!(max_dev <= 0.01 + 1e-12, "deviation {max_dev}");
        }
    }

    #[test]
    fn lhs_is_reproducible() {
        let space = SearchSpace::uniform(4, -3.0, 7.0).unwrap();
        let a = latin_hypercube(&space, 30, &mut seeded(99));
        let b = latin_hypercube(&space, 30, &mut seeded(99));
        assert_eq!(a, b);
        let c = latin_hypercube(&space, 30, &mut seeded(100));
        assert_ne!(a, c);
    }

    #[test]
    fn sigma_golden_value() {
        assert!((levy_sigma(1.5).unwrap() - SIGMA_1_5).abs() < 1e-12);
        let rel = |beta: f64, want: f64| (levy_sigma(beta).unwrap() - want).abs() / want;
        assert!(rel(1.1, 0.938_290_875_784_835_2) < 1e-10);
        assert!(rel(1.3, 0.819_837_286_012_732_8) < 1e-10);
        assert!(rel(1.8, 0.458_638_116_038_681_9) < 1e-10);
    }

    #[test]
    fn sigma_boundaries() {
        assert_eq!(levy_sigma(2.0).unwrap(), 0.0);
        assert!((levy_sigma_unchecked(1.0) - 1.0).abs() < 1e-12);
        assert!(matches!(levy_sigma(1.0), Err(Error::Domain(_))));
        assert!(levy_sigma(2.5).is_err());
        assert!(LevyParams::new(0.5).is_err());
    }

    #[test]
    fn levy_component_by_hand() {
        let p = LevyParams::new(1.5).unwrap();
        assert!((levy_component(1.0, 1.0, &p) - 0.01 * SIGMA_1_5).abs() < 1e-15);
        assert_eq!(levy_component(0.0, 0.3, &p), 0.0);
        // |v|^(1/β) with v = -8, β = 1.5 gives 4.
        assert!((levy_component(2.0, -8.0, &p) - 0.01 * 2.0 * SIGMA_1_5 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn levy_steps_are_heavy_tailed() {
        let p = LevyParams::new(1.5).unwrap();
        let mut rng = seeded(5);
        let mut mags: Vec<f64> = levy_step(1_000_000, &p, &mut rng)
            .into_iter()
            .map(f64::abs)
            .collect();
        mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = mags[mags.len() / 2];
        let max = *mags.last().unwrap();
        assert!(median.is_finite() && median < 0.1, "median {median}");
        assert!(max > 100.0 * median, "max {max} median {median}");
    }

    #[test]
    fn cauchy_closed_form() {
        assert_eq!(cauchy_from_uniform(0.7, 0.1, 0.5), 0.7);
        assert!((cauchy_from_uniform(0.2, 0.1, 0.75) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn cauchy_median_is_location() {
        let mut rng = seeded(21);
        let mut xs: Vec<f64> = (0..100_000).map(|_| cauchy_draw(0.2, 0.1, &mut rng)).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = xs[xs.len() / 2];
        assert!((median - 0.2).abs() < 0.01, "median {median}");
    }

    #[test]
    fn forks_differ_but_repeat() {
        let a: Vec<u64> = (0..4).map({
            let mut r = fork(1, 1);
            move |_| r.random()
        }).collect();
        let b: Vec<u64> = (0..4).map({
            let mut r = fork(1, 1);
            move |_| r.random()
        }).collect();
        let c: Vec<u64> = (0..4).map({
            let mut r = fork(1, 2);
            move |_| r.random()
        }).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
