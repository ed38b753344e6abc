//! Safe-zone drive: push particles one at a time in the direction of `v`,
//! keeping the not-yet-processed region populated by single active particles.

use std::cmp::Ordering;

use crate::engine::{Engine, ToppleMode};
use crate::error::{Error, Result};
use crate::field::{Instruction, InstructionField};
use crate::model::{code, Boundary, Configuration, Lattice, Shape, Volume};

#[derive(Debug, Clone)]
pub struct SafeZoneResult {
    /// Particles that left the box.
    pub exits: u64,
    /// Particles asleep in the already-processed region at the end.
    pub left_behind: u64,
    /// Steps whose site held a particle when the step began.
    pub occupied_steps: u64,
    /// Steps that increased the number of sleepers behind the front.
    pub steps_leaving_behind: u64,
    /// Every toppled site, in order; replayable as legal topplings.
    pub log: Vec<usize>,
    pub config: Configuration,
}

/// Runs the drive on a kill-boundary box. Sites are processed in increasing
/// `x . v`, ties broken lexicographically.
///
/// Step `i` starts at `x_i` and keeps toppling legally any active site already
/// processed and any unprocessed site holding two or more particles, until
/// neither exists. Unprocessed sites therefore never hold more than one
/// active particle, and every particle ends either outside the box or asleep
/// behind the front.
pub fn safe_zone_drive(cfg: &Configuration, v: &[f64], field: &InstructionField) -> Result<SafeZoneResult> {
    let lattice = cfg.lattice().clone();
    if lattice.shape() != Shape::Box(Boundary::Kill) {
        return Err(Error::WrongModel("safe-zone drive needs a kill-boundary box".into()));
    }
    if v.len() != lattice.dim() {
        return Err(Error::InvalidSpec("direction vector has the wrong dimension".into()));
    }
    for i in lattice.interior() {
        let n = cfg.count(i);
        if n >= 2 {
            return Err(Error::NonBinaryInput { site: lattice.coords(i), count: n });
        }
    }
    let order = processing_order(&lattice, v);
    let vol = Volume::whole(&lattice);
    let mut processed = vec![false; lattice.len()];
    let mut e = Engine::new(cfg.clone(), field.clone())?;
    let mut log = Vec::new();
    let mut occupied_steps = 0;
    let mut steps_leaving_behind = 0;
    let mut sleepers_behind = 0i64;
    let mut work: Vec<usize> = Vec::new();
    for &x in &order {
        processed[x] = true;
        let c = e.config().codes()[x];
        if c == code::SLEEPING {
            sleepers_behind += 1;
        }
        if c == code::EMPTY || c == code::SLEEPING {
            continue;
        }
        occupied_steps += 1;
        let before = sleepers_behind;
        work.clear();
        work.push(x);
        while let Some(y) = work.pop() {
            loop {
                let cy = e.config().codes()[y];
                let movable = if processed[y] { cy > 0 } else { cy >= 2 };
                if !movable {
                    break;
                }
                let target = match e.peek(y) {
                    Instruction::Jump(d) => e.neighbour(y, d),
                    Instruction::Sleep => None,
                };
                let before_target = target.map(|z| e.config().codes()[z]);
                e.topple(y, ToppleMode::Legal)?;
                log.push(y);
                let codes = e.config().codes();
                if processed[y] {
                    sleepers_behind += i64::from(codes[y] == code::SLEEPING) - i64::from(cy == code::SLEEPING);
                }
                if let (Some(z), Some(bz)) = (target, before_target) {
                    if processed[z] {
                        sleepers_behind += i64::from(codes[z] == code::SLEEPING) - i64::from(bz == code::SLEEPING);
                    }
                    work.push(z);
                }
            }
        }
        if sleepers_behind > before {
            steps_leaving_behind += 1;
        }
    }
    debug_assert_eq!(sleepers_behind as u64, e.config().sleepers_in(&vol));
    let exits = e.exits();
    let left_behind = e.config().sleepers_in(&vol);
    let (config, _) = e.into_parts();
    Ok(SafeZoneResult { exits, left_behind, occupied_steps, steps_leaving_behind, log, config })
}

fn processing_order(lattice: &Lattice, v: &[f64]) -> Vec<usize> {
    let mut keyed: Vec<(f64, Vec<i64>, usize)> = lattice
        .interior()
        .map(|i| {
            let x = lattice.coords(i);
            let dot = x.iter().zip(v).map(|(a, b)| *a as f64 * b).sum();
            (dot, x, i)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then_with(|| a.1.cmp(&b.1)));
    keyed.into_iter().map(|(_, _, i)| i).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{stabilize, Strategy, DEFAULT_BUDGET};
    use crate::model::{sample_initial, InitialState, JumpDistribution, ModelParams, SleepRate};

    fn biased_field(seed: u64, lambda: f64) -> InstructionField {
        InstructionField::new(seed, ModelParams::new(SleepRate::Finite(lambda), JumpDistribution::biased(2, 0.4).unwrap()))
    }

    #[test]
    fn empty_box_does_nothing() {
        let l = Lattice::cube(2, 4, Boundary::Kill).unwrap();
        let r = safe_zone_drive(&Configuration::empty(l), &[1.0, 0.0], &biased_field(0, 1.0)).unwrap();
        assert_eq!((r.exits, r.left_behind, r.log.len()), (0, 0, 0));
    }

    #[test]
    fn rejects_piles() {
        let l = Lattice::cube(1, 4, Boundary::Kill).unwrap();
        let cfg = Configuration::constant(l, 2);
        let f = InstructionField::new(0, ModelParams::new(SleepRate::Finite(1.0), JumpDistribution::directed_1d()));
        assert!(matches!(safe_zone_drive(&cfg, &[1.0], &f), Err(Error::NonBinaryInput { .. })));
    }

    #[test]
    fn log_replays_legally_and_matches_engine() {
        let l = Lattice::cube(2, 6, Boundary::Kill).unwrap();
        for seed in 0..20 {
            let cfg = sample_initial(&InitialState::bernoulli(0.5).unwrap(), &l, seed).unwrap();
            let f = biased_field(seed, 0.3);
            let r = safe_zone_drive(&cfg, &[1.0, 0.0], &f).unwrap();
            let mut e = Engine::new(cfg.clone(), f.clone()).unwrap();
            for &y in &r.log {
                e.topple(y, ToppleMode::Legal).unwrap();
            }
            assert_eq!(e.config(), &r.config);
            assert!(r.config.is_absorbing());
            assert_eq!(r.exits + r.left_behind, cfg.total_particles());
            let s = stabilize(&cfg, &Volume::whole(&l), &f, Strategy::QueueFifo, ToppleMode::Legal, DEFAULT_BUDGET).unwrap();
            assert_eq!(s.config, r.config);
            assert_eq!(s.exits, r.exits);
        }
    }

    #[test]
    fn directed_steps_leave_one_behind_at_rate_q() {
        let l = Lattice::cube(1, 200, Boundary::Kill).unwrap();
        let (mut steps, mut behind) = (0u64, 0u64);
        for seed in 0..40 {
            let cfg = sample_initial(&InitialState::bernoulli(0.5).unwrap(), &l, seed).unwrap();
            let f = InstructionField::new(seed ^ 77, ModelParams::new(SleepRate::Finite(1.0), JumpDistribution::directed_1d()));
            let r = safe_zone_drive(&cfg, &[1.0], &f).unwrap();
            steps += r.occupied_steps;
            behind += r.steps_leaving_behind;
        }
        let p = behind as f64 / steps as f64;
        let sd = (0.25 / steps as f64).sqrt();
        assert!((p - 0.5).abs() < 5.0 * sd, "{p}");
    }
}
