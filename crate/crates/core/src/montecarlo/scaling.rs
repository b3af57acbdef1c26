//! Sub-threshold scaling exponent fits.

use serde::{Deserialize, Serialize};

use super::stats::least_squares;
use super::threshold::RatePoint;
use crate::error::{Error, Result};

pub const MIN_FIT_FAILURES: u64 = 10;
pub const MIN_FIT_POINTS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub d: usize,
    /// Estimated exponent of `p_L` in the rate.
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// Smallest and largest fitted rate.
    pub range: (f64, f64),
    pub points: usize,
}

/// Least squares of `log p_L` on `log rate` over points of distance `d` with
/// rate at most `threshold / 2` and at least `min_failures` failures.
pub fn fit_scaling_exponent(
    points: &[RatePoint],
    d: usize,
    threshold: f64,
    min_failures: u64,
) -> Result<ScalingFit> {
    let usable: Vec<&RatePoint> = points
        .iter()
        .filter(|p| p.d == d && p.rate > 0.0 && p.rate <= threshold / 2.0 && p.failures >= min_failures)
        .collect();
    if usable.len() < MIN_FIT_POINTS {
        let total = points.iter().filter(|p| p.d == d).count();
        return Err(Error::InsufficientStatistics(format!(
            "d={d}: {} of {total} points have rate <= {} and >= {min_failures} failures; need {MIN_FIT_POINTS}",
            usable.len(),
            threshold / 2.0
        )));
    }
    let xs: Vec<f64> = usable.iter().map(|p| p.rate.ln()).collect();
    let ys: Vec<f64> = usable
        .iter()
        .map(|p| (p.failures as f64 / p.shots as f64).ln())
        .collect();
    let fit = least_squares(&xs, &ys).ok_or_else(|| {
        Error::InsufficientStatistics(format!("d={d}: fitted rates are not distinct"))
    })?;
    let lo = usable.iter().map(|p| p.rate).fold(f64::INFINITY, f64::min);
    let hi = usable.iter().map(|p| p.rate).fold(0.0, f64::max);
    Ok(ScalingFit {
        d,
        slope: fit.slope,
        intercept: fit.intercept,
        r2: fit.r2,
        range: (lo, hi),
        points: usable.len(),
    })
}
