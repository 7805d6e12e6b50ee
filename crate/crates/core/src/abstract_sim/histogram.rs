//! Sampling distributions of the discrimination index under simple
//! partner-choice rules, in the abstract setting.
//!
//! A simulated episode has five co-players, each of uniformly random color
//! and strategy. In every race the focal picks first, so its pick is never
//! constrained by the other players. The association counts of
//! `episodes_per_sample` episodes are pooled into one matrix, which yields
//! one index value; `n_sims` such values form the histogram.

use super::SamplingPolicy;
use crate::game::{Color, Strategy};
use crate::metrics::{discrimination_index, AssociationMatrix};
use crate::rng::{derive_seed, make_rng, SimRng};
use crate::stats::quantile_sorted;
use rand::seq::IndexedRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

pub const COPLAYERS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistogramConfig {
    pub sampler: SamplingPolicy,
    pub n_sims: u64,
    /// Partner-choice rounds per episode, all against the same co-players.
    pub races: u32,
    /// Episodes whose counts are pooled into a single sample.
    pub episodes_per_sample: u32,
    pub seed: u64,
}

impl HistogramConfig {
    pub fn new(sampler: SamplingPolicy, n_sims: u64, races: u32, episodes_per_sample: u32, seed: u64) -> Self {
        HistogramConfig { sampler, n_sims, races, episodes_per_sample, seed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscriminationHistogram {
    /// Index value to number of samples, in increasing value order.
    pub counts: BTreeMap<i64, u64>,
    /// Empirical 2.5% quantile.
    pub lower: f64,
    /// Empirical 97.5% quantile.
    pub upper: f64,
    pub n_sims: u64,
}

impl DiscriminationHistogram {
    pub fn mean(&self) -> f64 {
        let total: f64 = self.counts.iter().map(|(&d, &c)| d as f64 * c as f64).sum();
        total / self.n_sims as f64
    }

    /// Share of samples with `lo < d < hi`.
    pub fn fraction_strictly_within(&self, lo: i64, hi: i64) -> f64 {
        let inside: u64 = self.counts.range(lo + 1..hi).map(|(_, &c)| c).sum();
        inside as f64 / self.n_sims as f64
    }

    pub fn min(&self) -> Option<i64> {
        self.counts.keys().next().copied()
    }

    pub fn max(&self) -> Option<i64> {
        self.counts.keys().next_back().copied()
    }
}

#[derive(Debug, Clone, Copy)]
struct CoPlayer {
    color: Color,
    strategy: Strategy,
}

fn random_coplayers(rng: &mut SimRng) -> [CoPlayer; COPLAYERS] {
    std::array::from_fn(|_| CoPlayer {
        color: if rng.random::<bool>() { Color::Purple } else { Color::Teal },
        strategy: if rng.random::<bool>() { Strategy::Cooperate } else { Strategy::Defect },
    })
}

fn pick(sampler: SamplingPolicy, race: u32, pool: &[CoPlayer], rng: &mut SimRng) -> CoPlayer {
    let restricted: Vec<CoPlayer> = match sampler {
        SamplingPolicy::Visual(c) => pool.iter().copied().filter(|p| p.color == c).collect(),
        SamplingPolicy::Aware(c) if race == 0 => pool.iter().copied().filter(|p| p.color == c).collect(),
        SamplingPolicy::Aware(_) | SamplingPolicy::Omniscient => {
            pool.iter().copied().filter(|p| p.strategy == Strategy::Cooperate).collect()
        }
        SamplingPolicy::UniformRandom => Vec::new(),
    };
    *restricted.choose(rng).or_else(|| pool.choose(rng)).expect("pool is non-empty")
}

/// Pooled association counts for one sample.
pub fn sample_associations(sampler: SamplingPolicy, races: u32, episodes: u32, rng: &mut SimRng) -> AssociationMatrix {
    let mut m = AssociationMatrix::default();
    for _ in 0..episodes {
        let pool = random_coplayers(rng);
        for race in 0..races {
            let p = pick(sampler, race, &pool, rng);
            m.record(p.color, p.strategy);
        }
    }
    m
}

/// Histogram of the discrimination index over `n_sims` samples. Sample `i`
/// uses seed `derive_seed(seed, i)`.
pub fn simulate_sampling_histogram(config: &HistogramConfig) -> DiscriminationHistogram {
    let values: Vec<i64> = (0..config.n_sims)
        .into_par_iter()
        .map(|i| {
            let mut rng = make_rng(derive_seed(config.seed, i));
            let m = sample_associations(config.sampler, config.races, config.episodes_per_sample, &mut rng);
            discrimination_index(&m)
        })
        .collect();
    let mut counts = BTreeMap::new();
    for &d in &values {
        *counts.entry(d).or_insert(0) += 1;
    }
    let (lower, upper) = if values.is_empty() {
        (f64::NAN, f64::NAN)
    } else {
        let mut sorted: Vec<f64> = values.iter().map(|&d| d as f64).collect();
        sorted.sort_by(f64::total_cmp);
        (quantile_sorted(&sorted, 0.025), quantile_sorted(&sorted, 0.975))
    };
    DiscriminationHistogram { counts, lower, upper, n_sims: config.n_sims }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_sample_is_even_and_counts_add_up() {
        for sampler in [SamplingPolicy::UniformRandom, SamplingPolicy::Visual(Color::Teal), SamplingPolicy::Omniscient]
        {
            let h = simulate_sampling_histogram(&HistogramConfig::new(sampler, 2000, 8, 3, 5));
            assert!(h.counts.keys().all(|d| d % 2 == 0));
            assert_eq!(h.counts.values().sum::<u64>(), 2000);
            assert!(h.lower <= h.upper);
        }
    }

    #[test]
    fn pooled_counts_equal_races_times_episodes() {
        let mut rng = make_rng(1);
        let m = sample_associations(SamplingPolicy::UniformRandom, 8, 50, &mut rng);
        assert_eq!(m.participation(), 400);
    }

    #[test]
    fn omniscient_picks_cooperators_when_present() {
        let mut rng = make_rng(3);
        for _ in 0..200 {
            let pool = random_coplayers(&mut rng);
            let p = pick(SamplingPolicy::Omniscient, 0, &pool, &mut rng);
            if pool.iter().any(|c| c.strategy == Strategy::Cooperate) {
                assert_eq!(p.strategy, Strategy::Cooperate);
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = HistogramConfig::new(SamplingPolicy::Visual(Color::Purple), 500, 1, 50, 11);
        assert_eq!(simulate_sampling_histogram(&cfg), simulate_sampling_histogram(&cfg));
    }
}
