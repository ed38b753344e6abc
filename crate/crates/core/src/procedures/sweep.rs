//! Left-to-right exhaustion for directed walks in one dimension.

use crate::engine::{Engine, Odometer, ToppleMode};
use crate::error::{Error, Result};
use crate::field::InstructionField;
use crate::model::{Configuration, Shape};

#[derive(Debug, Clone)]
pub struct SweepResult {
    /// `flow[i]` = particles that jumped into the `i`-th site from the left
    /// boundary; `flow[0] = 0` and the last entry is the inflow into the origin.
    pub flow: Vec<u64>,
    /// Whether the last particle stayed asleep at each swept site left of the origin.
    pub last_slept: Vec<bool>,
    pub origin_odometer: u64,
    pub config: Configuration,
    pub odometer: Odometer,
    pub exits: u64,
}

impl SweepResult {
    /// Particles that reached the origin from the left.
    pub fn inflow(&self) -> u64 {
        *self.flow.last().unwrap_or(&0)
    }
}

/// Stabilizes a one-dimensional configuration under a directed kernel by
/// exhausting sites from the lowest coordinate upwards.
///
/// With `p(+1) = 1` a site never receives particles once every site to its
/// left is stable, so the per-site jump counts are the flows between
/// neighbouring sites.
pub fn directed_sweep(cfg: &Configuration, field: &InstructionField) -> Result<SweepResult> {
    let lattice = cfg.lattice().clone();
    if lattice.dim() != 1 || !field.jumps().is_directed() {
        return Err(Error::WrongModel("directed sweep needs d = 1 and p(+1) = 1".into()));
    }
    if matches!(lattice.shape(), Shape::Torus) {
        return Err(Error::WrongModel("directed sweep runs on an interval, not a ring".into()));
    }
    let origin = lattice
        .origin()
        .ok_or_else(|| Error::InvalidVolume("interval must contain the origin".into()))?;
    let lo = lattice.lower()[0];
    let hi = lattice.upper()[0];
    let mut e = Engine::new(cfg.clone(), field.clone())?;
    let mut flow = vec![0u64];
    let mut last_slept = Vec::new();
    let mut origin_odometer = 0;
    for x in lo..=hi {
        let idx = lattice.index_of(&[x]).expect("interior site");
        while e.is_unstable(idx, ToppleMode::Legal) {
            e.topple(idx, ToppleMode::Legal)?;
        }
        if idx == origin {
            origin_odometer = e.odometer().get(idx);
        }
        if x < 0 {
            flow.push(e.odometer().jump_odometer()[idx]);
            last_slept.push(e.config().get(idx) == crate::model::SiteState::Sleeping);
        }
    }
    let exits = e.exits();
    let (config, odometer) = e.into_parts();
    Ok(SweepResult { flow, last_slept, origin_odometer, config, odometer, exits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{stabilize, Strategy, DEFAULT_BUDGET};
    use crate::model::{sample_initial, Boundary, InitialState, JumpDistribution, Lattice, ModelParams, SleepRate, Volume};

    fn directed(seed: u64) -> InstructionField {
        InstructionField::new(seed, ModelParams::new(SleepRate::Finite(1.0), JumpDistribution::directed_1d()))
    }

    #[test]
    fn empty_gives_zero_flow() {
        let l = Lattice::cube(1, 20, Boundary::Kill).unwrap();
        let r = directed_sweep(&Configuration::empty(l), &directed(1)).unwrap();
        assert!(r.flow.iter().all(|&n| n == 0));
        assert_eq!(r.flow.len(), 21);
        assert_eq!(r.origin_odometer, 0);
    }

    #[test]
    fn rejects_symmetric_kernel() {
        let l = Lattice::cube(1, 5, Boundary::Kill).unwrap();
        let f = InstructionField::new(0, ModelParams::new(SleepRate::Finite(1.0), JumpDistribution::symmetric(1)));
        assert!(matches!(directed_sweep(&Configuration::empty(l), &f), Err(Error::WrongModel(_))));
    }

    #[test]
    fn recursion_and_engine_agreement() {
        let l = Lattice::cube(1, 60, Boundary::Kill).unwrap();
        for seed in 0..30 {
            let cfg = sample_initial(&InitialState::poisson(0.6).unwrap(), &l, seed).unwrap();
            let f = directed(seed + 100);
            let r = directed_sweep(&cfg, &f).unwrap();
            for (i, x) in (-60..0).enumerate() {
                let eta = u64::from(cfg.get_at(&[x]).unwrap().particle_count());
                let y = u64::from(r.last_slept[i]);
                assert_eq!(r.flow[i + 1], (r.flow[i] + eta).saturating_sub(y));
                assert!(r.flow[i + 1] <= r.flow[i] + eta);
            }
            let s = stabilize(&cfg, &Volume::whole(&l), &f, Strategy::QueueFifo, ToppleMode::Legal, DEFAULT_BUDGET).unwrap();
            assert_eq!(s.odometer.get(l.origin().unwrap()), r.origin_odometer);
            assert_eq!(s.config, r.config);
            assert_eq!(s.odometer, r.odometer);
        }
    }
}
