//! Exit counts with and without killing at the boundary of `V_n`.

use crate::engine::{stabilize, Status, Strategy, ToppleMode};
use crate::error::{Error, Result};
use crate::field::InstructionField;
use crate::model::{Boundary, Configuration, Lattice, Shape, Volume};

use super::particlewise::{particlewise_run, LabeledSystem, RunStatus};

/// Retries with a doubled proxy after a suspicious exit.
const PROXY_RETRIES: u32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct ExitCounts {
    /// Particles killed at the boundary when stabilizing in `V_n`.
    pub m_n: u64,
    /// Labeled particles that ever stood outside `V_n` in the unkilled run.
    pub m_n_star: u64,
    /// Side length of the enclosing window as a multiple of `V_n`'s.
    pub proxy_factor: i64,
    /// Set when a particle left the enclosing window through a face it could
    /// have walked back through, even after the retries.
    pub proxy_too_small: bool,
    pub status: RunStatus,
}

/// `cfg` lives on a kill-boundary box `V_n`. The unkilled dynamics run on a
/// box four times as wide with the same centre.
pub fn exit_counts(
    cfg: &Configuration,
    field: &InstructionField,
    system: &LabeledSystem,
    t_max: f64,
    budget: u64,
) -> Result<ExitCounts> {
    let v = cfg.lattice();
    if v.shape() != Shape::Box(Boundary::Kill) {
        return Err(Error::WrongModel("exit counts need a kill-boundary box".into()));
    }
    let s = stabilize(cfg, &Volume::whole(v), field, Strategy::ExhaustSiteThenNext, ToppleMode::Legal, budget)?;
    if s.status == Status::BudgetExceeded {
        return Err(Error::BudgetExceeded(budget));
    }
    let jumps = &system.params.jumps;
    let mut factor = 4;
    for attempt in 0..=PROXY_RETRIES {
        let (lo, hi): (Vec<i64>, Vec<i64>) = v
            .lower()
            .iter()
            .zip(v.upper())
            .map(|(&a, &b)| {
                let side = b - a + 1;
                let pad = (factor - 1) * side / 2;
                (a - pad, b + pad)
            })
            .unzip();
        let proxy = Lattice::boxed(lo, hi, Boundary::Kill)?;
        let inner = Volume::filter(&proxy, |x| {
            x.iter().zip(v.lower().iter().zip(v.upper())).all(|(c, (a, b))| c >= a && c <= b)
        });
        let r = particlewise_run(&cfg.transplant(&proxy), system, t_max, Some(&inner), false)?;
        let returnable = r.exits.iter().any(|e| jumps.weight(e.direction.reverse()) > 0.0);
        if !returnable || attempt == PROXY_RETRIES {
            return Ok(ExitCounts {
                m_n: s.exits,
                m_n_star: r.particles.iter().filter(|p| p.left_watch).count() as u64,
                proxy_factor: factor,
                proxy_too_small: returnable,
                status: r.status,
            });
        }
        factor *= 2;
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::DEFAULT_BUDGET;
    use crate::model::{JumpDistribution, ModelParams, SleepRate};

    #[test]
    fn empty_gives_zero() {
        let l = Lattice::cube(1, 10, Boundary::Kill).unwrap();
        let p = ModelParams::new(SleepRate::Finite(1.0), JumpDistribution::directed_1d());
        let r = exit_counts(&Configuration::empty(l), &InstructionField::new(0, p.clone()), &LabeledSystem::new(p, 0), 1e9, DEFAULT_BUDGET)
            .unwrap();
        assert_eq!((r.m_n, r.m_n_star), (0, 0));
        assert!(!r.proxy_too_small);
    }

    #[test]
    fn directed_exits_never_flag_the_proxy() {
        let l = Lattice::cube(1, 10, Boundary::Kill).unwrap();
        let p = ModelParams::new(SleepRate::Finite(1.0), JumpDistribution::directed_1d());
        let cfg = Configuration::constant(l, 1);
        let r = exit_counts(&cfg, &InstructionField::new(1, p.clone()), &LabeledSystem::new(p, 1), 1e9, DEFAULT_BUDGET).unwrap();
        assert!(!r.proxy_too_small);
        assert_eq!(r.proxy_factor, 4);
        assert!(r.m_n <= 21 && r.m_n_star <= 21);
    }
}
