//! Threshold location by pairwise crossings of logical error curves.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::stats::percentile;

pub const BOOTSTRAP_RESAMPLES: usize = 1000;

/// One point of a logical error curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub d: usize,
    pub rate: f64,
    pub shots: u64,
    pub failures: u64,
}

impl RatePoint {
    /// Observed rate, floored at half a failure so the log stays finite.
    fn log_p(&self, failures: u64) -> f64 {
        let f = (failures as f64).max(0.5);
        (f / self.shots as f64).ln()
    }
}

/// Crossing of one pair of distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCrossing {
    pub d_small: usize,
    pub d_large: usize,
    pub crossing: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    /// Mean over pairs that cross; `None` when no pair crosses in the grid.
    pub threshold: Option<f64>,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
    pub pairs: Vec<PairCrossing>,
    /// Bootstrap resamples in which at least one pair crossed.
    pub resamples_with_crossing: usize,
    pub resamples: usize,
}

impl ThresholdReport {
    pub fn crossed(&self) -> bool {
        self.threshold.is_some()
    }
}

/// Curves keyed by distance, each sorted by rate, restricted to rates every
/// distance shares.
fn curves(points: &[RatePoint]) -> BTreeMap<usize, Vec<RatePoint>> {
    let mut by_d: BTreeMap<usize, Vec<RatePoint>> = BTreeMap::new();
    for p in points {
        by_d.entry(p.d).or_default().push(*p);
    }
    for c in by_d.values_mut() {
        c.sort_by(|a, b| a.rate.total_cmp(&b.rate));
    }
    by_d
}

/// First rate where the larger code stops beating the smaller one, linearly
/// interpolated between the bracketing grid points.
fn pair_crossing(small: &[(f64, f64)], large: &[(f64, f64)]) -> Option<f64> {
    let diffs: Vec<(f64, f64)> = small
        .iter()
        .filter_map(|&(r, ls)| {
            large
                .iter()
                .find(|&&(rl, _)| (rl - r).abs() <= 1e-12 * r.abs().max(1.0))
                .map(|&(_, ll)| (r, ll - ls))
        })
        .collect();
    for w in diffs.windows(2) {
        let (r0, d0) = w[0];
        let (r1, d1) = w[1];
        if d0 < 0.0 && d1 >= 0.0 {
            return Some(r0 + (r1 - r0) * (-d0) / (d1 - d0));
        }
    }
    None
}

fn mean_crossing(by_d: &BTreeMap<usize, Vec<(f64, f64)>>) -> (Option<f64>, Vec<PairCrossing>) {
    let ds: Vec<usize> = by_d.keys().copied().collect();
    let mut pairs = Vec::new();
    for i in 0..ds.len() {
        for j in i + 1..ds.len() {
            pairs.push(PairCrossing {
                d_small: ds[i],
                d_large: ds[j],
                crossing: pair_crossing(&by_d[&ds[i]], &by_d[&ds[j]]),
            });
        }
    }
    let found: Vec<f64> = pairs.iter().filter_map(|p| p.crossing).collect();
    let mean = if found.is_empty() {
        None
    } else {
        Some(found.iter().sum::<f64>() / found.len() as f64)
    };
    (mean, pairs)
}

/// Mean pairwise crossing with a parametric bootstrap 95% interval.
pub fn find_threshold(points: &[RatePoint], seed: u64) -> ThresholdReport {
    find_threshold_with(points, seed, BOOTSTRAP_RESAMPLES)
}

pub fn find_threshold_with(points: &[RatePoint], seed: u64, resamples: usize) -> ThresholdReport {
    let by_d = curves(points);
    let logs = |f: &dyn Fn(&RatePoint) -> u64| -> BTreeMap<usize, Vec<(f64, f64)>> {
        by_d.iter()
            .map(|(&d, c)| (d, c.iter().map(|p| (p.rate, p.log_p(f(p)))).collect()))
            .collect()
    };
    let (threshold, pairs) = mean_crossing(&logs(&|p| p.failures));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let drawn: BTreeMap<usize, Vec<(f64, f64)>> = by_d
            .iter()
            .map(|(&d, c)| {
                let v = c
                    .iter()
                    .map(|p| {
                        let q = p.failures as f64 / p.shots.max(1) as f64;
                        let f = Binomial::new(p.shots, q).map(|b| b.sample(&mut rng)).unwrap_or(0);
                        (p.rate, p.log_p(f))
                    })
                    .collect();
                (d, v)
            })
            .collect();
        if let (Some(t), _) = mean_crossing(&drawn) {
            samples.push(t);
        }
    }
    samples.sort_by(f64::total_cmp);
    ThresholdReport {
        threshold,
        ci_lo: percentile(&samples, 0.025),
        ci_hi: percentile(&samples, 0.975),
        pairs,
        resamples_with_crossing: samples.len(),
        resamples,
    }
}
