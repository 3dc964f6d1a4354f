use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatsError {
    #[error("stratum {0} has no observations")]
    EmptyStratum(usize),
    #[error("no strata given")]
    NoStrata,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.low <= x && x <= self.high
    }
}

/// 1.96: two-sided 5% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Mean ± z·SE with the sample standard deviation. A single observation
/// gives a zero-width interval.
pub fn normal_ci(xs: &[f64], z: f64) -> Interval {
    let m = mean(xs);
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return Interval { low: m, high: m };
    }
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    let half = z * (var / n).sqrt();
    Interval {
        low: m - half,
        high: m + half,
    }
}

/// Mean of the per-stratum means.
pub fn stratified_mean(strata: &[Vec<f64>]) -> f64 {
    strata.iter().map(|s| mean(s)).sum::<f64>() / strata.len() as f64
}

/// Linear interpolation between closest ranks of a sorted sample.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Stratified percentile bootstrap for the mean of stratum means: each
/// resample redraws every stratum with replacement at its own size.
/// Returns the `level/2` and `1 - level/2` percentiles.
pub fn bootstrap_ci(
    strata: &[Vec<f64>],
    level: f64,
    resamples: usize,
    seed: u64,
) -> Result<Interval, StatsError> {
    if strata.is_empty() {
        return Err(StatsError::NoStrata);
    }
    if let Some(i) = strata.iter().position(|s| s.is_empty()) {
        return Err(StatsError::EmptyStratum(i));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = strata.len() as f64;
    let mut stats: Vec<f64> = (0..resamples)
        .map(|_| {
            strata
                .iter()
                .map(|s| {
                    let n = s.len();
                    (0..n).map(|_| s[rng.gen_range(0..n)]).sum::<f64>() / n as f64
                })
                .sum::<f64>()
                / k
        })
        .collect();
    stats.sort_by(f64::total_cmp);
    Ok(Interval {
        low: quantile(&stats, level / 2.0),
        high: quantile(&stats, 1.0 - level / 2.0),
    })
}
