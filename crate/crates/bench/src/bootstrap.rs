//! Percentile bootstrap for the mean.

use rand::Rng;

pub const DEFAULT_RESAMPLES: usize = 1000;
pub const LOWER_PERCENTILE: f64 = 2.5;
pub const UPPER_PERCENTILE: f64 = 97.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanInterval {
    pub mean: f64,
    pub low: f64,
    pub high: f64,
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Percentile `p` (in `[0, 100]`) of sorted data, interpolating linearly between order statistics.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = p / 100.0 * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// The sample mean with a 2.5/97.5 percentile interval over `resamples`
/// bootstrap means. The interval is widened to contain the mean if needed.
pub fn mean_interval<R: Rng + ?Sized>(values: &[f64], resamples: usize, rng: &mut R) -> Option<MeanInterval> {
    if values.is_empty() || resamples == 0 {
        return None;
    }
    let m = mean(values);
    let n = values.len();
    let mut means: Vec<f64> = (0..resamples)
        .map(|_| (0..n).map(|_| values[rng.random_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    Some(MeanInterval {
        mean: m,
        low: percentile(&means, LOWER_PERCENTILE).min(m),
        high: percentile(&means, UPPER_PERCENTILE).max(m),
    })
}
