//! Probability that a walk is killed while it sits in the half-space
//! `{z : z . v <= 0}`, killed at rate `lambda` there and jumping at rate 1.

use rand::Rng;
use rayon::prelude::*;

use crate::model::JumpDistribution;
use crate::rng::{derive_seed, stream};
use crate::stats::Estimate;

pub const DEFAULT_HORIZON: u64 = 100_000;

/// Walks with return probability below this are counted as escaped.
const ESCAPE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KilledWalkEstimate {
    pub estimate: Estimate,
    /// Replicas stopped at the horizon and counted as never killed. Truncation
    /// can only undercount killing.
    pub truncated: u64,
}

/// Monte Carlo estimate of the killing probability.
///
/// In the jump chain each visit to the half-space ends in death with
/// probability `lambda / (1 + lambda)` before the next jump. A walk is
/// declared escaped once it can provably never return (all steps move away
/// from the half-space) or once its height exceeds the level at which the
/// Lundberg bound on the return probability drops below `1e-9`.
pub fn killed_walk_prob(
    jumps: &JumpDistribution,
    v: &[f64],
    lambda: f64,
    replicas: u64,
    horizon: u64,
    seed: u64,
) -> KilledWalkEstimate {
    if lambda <= 0.0 || replicas == 0 {
        return KilledWalkEstimate { estimate: Estimate::exact(0.0, replicas), truncated: 0 };
    }
    let kill = if lambda.is_infinite() { 1.0 } else { lambda / (1.0 + lambda) };
    let steps: Vec<(f64, f64)> = jumps
        .support()
        .map(|d| (jumps.weight(d), d.sign() as f64 * v[d.axis()]))
        .collect();
    let monotone = steps.iter().all(|&(_, h)| h > 0.0);
    let escape_height = if monotone { 0.0 } else { lundberg_height(&steps) };
    let outcomes: Vec<(bool, bool)> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(derive_seed(seed, &[r]));
            let mut h = 0.0f64;
            for _ in 0..horizon {
                if h <= 0.0 {
                    if rng.random::<f64>() < kill {
                        return (true, false);
                    }
                } else if h > escape_height {
                    return (false, false);
                }
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut dh = steps[steps.len() - 1].1;
                for &(w, s) in &steps {
                    acc += w;
                    if u < acc {
                        dh = s;
                        break;
                    }
                }
                h += dh;
            }
            (false, true)
        })
        .collect();
    let killed: Vec<f64> = outcomes.iter().map(|&(k, _)| f64::from(u8::from(k))).collect();
    let truncated = outcomes.iter().filter(|&&(_, t)| t).count() as u64;
    KilledWalkEstimate { estimate: Estimate::from_samples(&killed), truncated }
}

/// Height above which a positively drifting walk returns to `h <= 0` with
/// probability below the tolerance. Infinite when the drift is not positive.
fn lundberg_height(steps: &[(f64, f64)]) -> f64 {
    let drift: f64 = steps.iter().map(|(w, s)| w * s).sum();
    if drift <= 0.0 {
        return f64::INFINITY;
    }
    // theta > 0 with E exp(-theta S) = 1 bounds P(return from h) by exp(-theta h)
    let f = |t: f64| steps.iter().map(|(w, s)| w * (-t * s).exp()).sum::<f64>() - 1.0;
    let mut hi = 1.0;
    while f(hi) <= 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return 0.0;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= 0.0 || f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let theta = lo.max(f64::MIN_POSITIVE);
    -ESCAPE_TOLERANCE.ln() / theta
}
