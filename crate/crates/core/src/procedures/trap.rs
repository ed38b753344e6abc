//! Trap exploration in one dimension: reveal instructions along each
//! particle's would-be path and choose a sleep instruction to park it on,
//! so that the particles settle without the origin ever being toppled.

use crate::engine::{Engine, Strategy, ToppleMode, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::field::{Instruction, InstructionField};
use crate::model::{Configuration, Lattice, Volume};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrapFailure {
    OriginOccupied,
    /// No site between the previous trap and the particle had a sleep
    /// instruction just before its last jump.
    NoTrap { side: i8, particle: usize },
    /// The explorer used up its jump allowance before reaching the previous trap.
    ExplorationCap { side: i8, particle: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrapStatus {
    Success,
    Failed(TrapFailure),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrapOptions {
    pub particles_per_side: usize,
    /// Jumps allowed to a single explorer.
    pub jump_cap: u64,
    /// Replay the settling topplings through the engine and check the origin.
    pub verify: bool,
}

impl Default for TrapOptions {
    fn default() -> Self {
        TrapOptions { particles_per_side: usize::MAX, jump_cap: 1_000_000, verify: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrapResult {
    pub status: TrapStatus,
    /// Traps on the positive side, increasing.
    pub positive: Vec<i64>,
    /// Traps on the negative side, decreasing.
    pub negative: Vec<i64>,
    /// `|a_k - a_{k-1}|` for every trap found, both sides, in discovery order.
    pub interdistances: Vec<u64>,
    pub revealed: u64,
    /// Settling topplings `(site, instruction index)` in execution order: each
    /// particle's path up to and including its trap instruction.
    pub settle_log: Vec<(i64, u64)>,
    /// Origin odometer of the engine stabilization over the explored window;
    /// present when verification ran on a successful exploration.
    pub origin_odometer: Option<u64>,
}

/// Per-site instruction counters on a growable stretch of `Z`.
struct Counters {
    base: i64,
    count: Vec<u64>,
    epoch: Vec<u32>,
    start: Vec<u64>,
}

impl Counters {
    fn new() -> Self {
        Counters { base: 0, count: Vec::new(), epoch: Vec::new(), start: Vec::new() }
    }

    fn slot(&mut self, x: i64) -> usize {
        if self.count.is_empty() {
            self.base = x;
        }
        if x < self.base {
            let grow = (self.base - x) as usize + self.count.len();
            let pad = |v: &mut Vec<_>, z| {
                let mut n = vec![z; grow];
                n.append(v);
                *v = n;
            };
            pad(&mut self.count, 0u64);
            let mut e = vec![0u32; grow];
            e.append(&mut self.epoch);
            self.epoch = e;
            let mut s = vec![0u64; grow];
            s.append(&mut self.start);
            self.start = s;
            self.base -= grow as i64;
        }
        let i = (x - self.base) as usize;
        if i >= self.count.len() {
            let n = (i + 1).max(2 * self.count.len());
            self.count.resize(n, 0);
            self.epoch.resize(n, 0);
            self.start.resize(n, 0);
        }
        i
    }
}

struct Side<'a> {
    field: &'a InstructionField,
    counters: &'a mut Counters,
    sign: i64,
    cap: u64,
}

/// One exploration: `steps` holds `(site, instruction index)` for every
/// revealed instruction in order.
struct Exploration {
    steps: Vec<(i64, u64)>,
}

impl Side<'_> {
    /// Walks the explorer from folded position `start` until it reaches `stop`.
    fn explore(&mut self, epoch: u32, start: i64, stop: i64) -> Option<Exploration> {
        let mut pos = start;
        let mut jumps = 0u64;
        let mut steps = Vec::new();
        while pos != stop {
            let real = self.sign * pos;
            let i = self.counters.slot(real);
            if self.counters.epoch[i] != epoch {
                self.counters.epoch[i] = epoch;
                self.counters.start[i] = self.counters.count[i];
            }
            let j = self.counters.count[i] + 1;
            self.counters.count[i] = j;
            steps.push((real, j));
            if let Instruction::Jump(d) = self.field.instruction_at(&[real], j) {
                pos += self.sign * d.sign();
                jumps += 1;
                if jumps > self.cap {
                    return None;
                }
            }
        }
        Some(Exploration { steps })
    }

    /// Closest site to `prev` in `(prev, particle)` whose second-last
    /// instruction revealed in this exploration is a sleep.
    fn choose_trap(&mut self, epoch: u32, prev: i64, particle: i64) -> Option<i64> {
        (prev + 1..particle).find(|&u| {
            let real = self.sign * u;
            let i = self.counters.slot(real);
            let own = if self.counters.epoch[i] == epoch { self.counters.count[i] - self.counters.start[i] } else { 0 };
            own >= 2 && self.field.instruction_at(&[real], self.counters.count[i] - 1) == Instruction::Sleep
        })
    }
}

/// Runs the exploration on the positive half-line and, if every particle
/// there found a trap, on the negative half-line.
pub fn trap_explore(cfg: &Configuration, field: &InstructionField, opts: TrapOptions) -> Result<TrapResult> {
    let lattice = cfg.lattice();
    if lattice.dim() != 1 || field.jumps().dim() != 1 {
        return Err(Error::WrongModel("trap exploration is one-dimensional".into()));
    }
    let mut result = TrapResult {
        status: TrapStatus::Success,
        positive: Vec::new(),
        negative: Vec::new(),
        interdistances: Vec::new(),
        revealed: 0,
        settle_log: Vec::new(),
        origin_odometer: None,
    };
    if cfg.get_at(&[0]).is_some_and(|s| s.particle_count() > 0) {
        result.status = TrapStatus::Failed(TrapFailure::OriginOccupied);
        return Ok(result);
    }
    let mut pos_particles = Vec::new();
    let mut neg_particles = Vec::new();
    for i in lattice.interior() {
        let x = lattice.coord(i, 0);
        for _ in 0..cfg.count(i) {
            if x > 0 {
                pos_particles.push(x);
            } else {
                neg_particles.push(-x);
            }
        }
    }
    pos_particles.sort_unstable();
    neg_particles.sort_unstable();
    pos_particles.truncate(opts.particles_per_side);
    neg_particles.truncate(opts.particles_per_side);

    let mut counters = Counters::new();
    let mut epoch = 0u32;
    for (sign, particles) in [(1i64, &pos_particles), (-1, &neg_particles)] {
        let mut side = Side { field, counters: &mut counters, sign, cap: opts.jump_cap };
        let mut prev = 0i64;
        for (k, &x) in particles.iter().enumerate() {
            epoch += 1;
            let Some(ex) = side.explore(epoch, x, prev) else {
                result.status = TrapStatus::Failed(TrapFailure::ExplorationCap { side: sign as i8, particle: k + 1 });
                return Ok(result);
            };
            result.revealed += ex.steps.len() as u64;
            let Some(trap) = side.choose_trap(epoch, prev, x) else {
                result.status = TrapStatus::Failed(TrapFailure::NoTrap { side: sign as i8, particle: k + 1 });
                return Ok(result);
            };
            let real_trap = sign * trap;
            let last = ex.steps.iter().rposition(|&(s, _)| s == real_trap).expect("trap visited");
            let cut = ex.steps[..last].iter().rposition(|&(s, _)| s == real_trap).expect("two visits");
            for &(s, _) in &ex.steps[cut + 1..] {
                let u = sign * s;
                assert!(
                    u > prev && u <= trap,
                    "unused instruction at {s} outside ({}, {}]",
                    sign * prev,
                    real_trap
                );
            }
            result.settle_log.extend_from_slice(&ex.steps[..=cut]);
            result.interdistances.push((trap - prev) as u64);
            if sign > 0 {
                result.positive.push(real_trap);
            } else {
                result.negative.push(real_trap);
            }
            prev = trap;
        }
    }
    if opts.verify {
        result.origin_odometer = Some(verify(field, &pos_particles, &neg_particles, &result)?);
    }
    Ok(result)
}

/// Replays the settling topplings as acceptable topplings and stabilizes the
/// explored particles legally on `[x_{-n}, x_n]`. Returns the origin odometer.
fn verify(field: &InstructionField, pos: &[i64], neg: &[i64], res: &TrapResult) -> Result<u64> {
    let log = &res.settle_log;
    let mut lo = -neg.last().copied().unwrap_or(0);
    let mut hi = pos.last().copied().unwrap_or(0);
    let window_lo = lo;
    let window_hi = hi;
    for &(s, _) in log.iter() {
        lo = lo.min(s);
        hi = hi.max(s);
    }
    let explored = |l: &Lattice| -> Configuration {
        let mut c = Configuration::empty(l.clone());
        for &x in pos {
            c.add_active(l.index_of(&[x]).expect("site"), 1);
        }
        for &x in neg {
            c.add_active(l.index_of(&[-x]).expect("site"), 1);
        }
        c
    };

    let replay_lattice = Lattice::window(vec![lo], vec![hi])?;
    let mut e = Engine::new(explored(&replay_lattice), field.clone())?;
    for &(s, j) in log.iter() {
        let idx = replay_lattice.index_of(&[s]).expect("site");
        assert_eq!(e.odometer().get(idx) + 1, j, "replay out of step at {s}");
        e.topple(idx, ToppleMode::Acceptable)?;
    }
    let origin = replay_lattice.origin().expect("origin");
    assert_eq!(e.odometer().get(origin), 0, "replay toppled the origin");
    for &t in res.positive.iter().chain(&res.negative) {
        let idx = replay_lattice.index_of(&[t]).expect("site");
        assert_eq!(e.config().get(idx), crate::model::SiteState::Sleeping, "no sleeper at trap {t}");
    }
    assert_eq!(e.config().total_particles(), (res.positive.len() + res.negative.len()) as u64);

    let window = Lattice::window(vec![window_lo], vec![window_hi])?;
    let mut w = Engine::new(explored(&window), field.clone())?;
    w.stabilize(&Volume::whole(&window), Strategy::ExhaustSiteThenNext, ToppleMode::Legal, DEFAULT_BUDGET)?;
    Ok(w.odometer().get(window.origin().expect("origin")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Boundary, JumpDistribution, ModelParams, SiteState, SleepRate};

    fn field(seed: u64) -> InstructionField {
        InstructionField::new(seed, ModelParams::new(SleepRate::Finite(1.0), JumpDistribution::symmetric(1)))
    }

    #[test]
    fn empty_succeeds_without_traps() {
        let l = Lattice::cube(1, 10, Boundary::Kill).unwrap();
        let r = trap_explore(&Configuration::empty(l), &field(0), TrapOptions::default()).unwrap();
        assert_eq!(r.status, TrapStatus::Success);
        assert!(r.positive.is_empty() && r.negative.is_empty());
    }

    #[test]
    fn occupied_origin_fails() {
        let l = Lattice::cube(1, 10, Boundary::Kill).unwrap();
        let mut c = Configuration::empty(l);
        c.set_at(&[0], SiteState::Active(1)).unwrap();
        let r = trap_explore(&c, &field(0), TrapOptions::default()).unwrap();
        assert_eq!(r.status, TrapStatus::Failed(TrapFailure::OriginOccupied));
    }

    #[test]
    fn success_is_verified_by_engine() {
        let l = Lattice::cube(1, 40, Boundary::Kill).unwrap();
        let mut successes = 0;
        for seed in 0..60 {
            let mut c = Configuration::empty(l.clone());
            for x in [8, 15, 27, -9, -20, -33] {
                c.set_at(&[x], SiteState::Active(1)).unwrap();
            }
            let r = trap_explore(&c, &field(seed), TrapOptions { jump_cap: 200_000, ..TrapOptions::default() }).unwrap();
            if r.status == TrapStatus::Success {
                successes += 1;
                assert_eq!(r.origin_odometer, Some(0));
                assert!(r.positive.windows(2).all(|w| w[0] < w[1]));
                assert!(r.negative.windows(2).all(|w| w[0] > w[1]));
                for (a, x) in r.positive.iter().zip([8, 15, 27]) {
                    assert!(*a < x);
                }
            }
        }
        assert!(successes > 0);
    }

    #[test]
    fn counters_grow_both_ways() {
        let mut c = Counters::new();
        let a = c.slot(5);
        c.count[a] = 3;
        let _ = c.slot(-7);
        let b = c.slot(5);
        assert_eq!(c.count[b], 3);
        let _ = c.slot(100);
        let i = c.slot(5);
        assert_eq!(c.count[i], 3);
    }
}
