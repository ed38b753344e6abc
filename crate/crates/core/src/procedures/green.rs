//! Expected number of visits of a random walk to its starting point.

use rayon::prelude::*;

use crate::model::JumpDistribution;
use crate::rng::{derive_seed, stream};
use crate::stats::Estimate;
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenEstimate {
    pub estimate: Estimate,
    /// Set for driftless walks in `d <= 2`, which are recurrent: the estimate
    /// then grows with the horizon.
    pub not_transient: bool,
    /// Replicas still running at the horizon. Visits after it are missed.
    pub truncated: u64,
}

/// Monte Carlo estimate of the Green function at the origin, time 0 included.
/// A walk whose support lies in one direction per axis never returns, which
/// gives exactly 1.
pub fn green_function_estimate(jumps: &JumpDistribution, replicas: u64, horizon: u64, seed: u64) -> GreenEstimate {
    let d = jumps.dim();
    let one_way = (0..d).all(|a| {
        let w = jumps.weights();
        w[2 * a] == 0.0 || w[2 * a + 1] == 0.0
    });
    let not_transient = d <= 2 && jumps.drift().iter().all(|&m| m.abs() < 1e-12);
    if one_way {
        return GreenEstimate { estimate: Estimate::exact(1.0, replicas), not_transient: false, truncated: 0 };
    }
    let runs: Vec<f64> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(derive_seed(seed, &[r]));
            let mut pos = vec![0i64; d];
            let mut away = 0usize;
            let mut visits = 1u64;
            for _ in 0..horizon {
                let dir = jumps.sample(rng.random());
                let a = dir.axis();
                let was = pos[a] != 0;
                pos[a] += dir.sign();
                let now = pos[a] != 0;
                away = away + usize::from(now) - usize::from(was);
                if away == 0 {
                    visits += 1;
                }
            }
            visits as f64
        })
        .collect();
    GreenEstimate { estimate: Estimate::from_samples(&runs), not_transient, truncated: replicas }
}
