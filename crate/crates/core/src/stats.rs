//! Sample summaries used by procedures and experiment drivers.

use serde::Serialize;

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
}

impl Estimate {
    pub fn exact(value: f64, n: u64) -> Self {
        Estimate { mean: value, stderr: 0.0, n }
    }

    /// Mean and standard error (unbiased variance) of a sample. Empty samples
    /// give a NaN mean.
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Estimate { mean: f64::NAN, stderr: f64::NAN, n: 0 };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let stderr = if n > 1 {
            let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Estimate { mean, stderr, n: n as u64 }
    }

    /// Proportion estimate with binomial standard error.
    pub fn proportion(hits: u64, n: u64) -> Self {
        if n == 0 {
            return Estimate { mean: f64::NAN, stderr: f64::NAN, n: 0 };
        }
        let p = hits as f64 / n as f64;
        Estimate { mean: p, stderr: (p * (1.0 - p) / n as f64).sqrt(), n }
    }

    /// Standard error of the difference of two independent estimates.
    pub fn pooled_stderr(&self, other: &Estimate) -> f64 {
        (self.stderr * self.stderr + other.stderr * other.stderr).sqrt()
    }
}

/// Empirical quantile by the nearest-rank rule on a sorted sample.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let rank = (p * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// Batch-means estimate after dropping a burn-in fraction.
pub fn batch_means(trace: &[f64], burn_in: f64, batches: usize) -> Estimate {
    let start = ((trace.len() as f64) * burn_in).floor() as usize;
    let kept = &trace[start.min(trace.len())..];
    let size = kept.len() / batches.max(1);
    if size == 0 {
        return Estimate::from_samples(kept);
    }
    let means: Vec<f64> = kept
        .chunks_exact(size)
        .take(batches)
        .map(|c| c.iter().sum::<f64>() / c.len() as f64)
        .collect();
    let mut e = Estimate::from_samples(&means);
    e.mean = kept[..size * means.len()].iter().sum::<f64>() / (size * means.len()) as f64;
    e.n = kept.len() as u64;
    e
}
