//! Site-wise continuous-time dynamics: every site carries a Poisson clock of
//! rate `(1 + lambda) * n` while it holds `n` active particles, and each ring
//! executes the site's next instruction.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{Engine, Odometer, ToppleMode};
use crate::error::{Error, Result};
use crate::field::{Instruction, InstructionField};
use crate::model::{Configuration, SleepRate};
use crate::rng::stream;
use crate::trace::TimedEvent;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Absorbed,
    /// `t_max` was reached with active particles left.
    Unabsorbed,
}

#[derive(Debug, Clone)]
pub struct CtRun {
    pub status: RunStatus,
    /// Time of the last ring, or `t_max` when unabsorbed.
    pub time: f64,
    pub config: Configuration,
    /// Local times `h_t(x)`: instructions used at each site.
    pub odometer: Odometer,
    pub exits: u64,
    pub events: Vec<TimedEvent>,
}

/// Heap entry; ties in time go to the lower site index.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Ring {
    t: f64,
    site: usize,
    version: u64,
}

impl Eq for Ring {}

impl Ord for Ring {
    fn cmp(&self, o: &Self) -> Ordering {
        self.t.total_cmp(&o.t).then(self.site.cmp(&o.site)).then(self.version.cmp(&o.version))
    }
}

impl PartialOrd for Ring {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

struct Clocks {
    heap: BinaryHeap<Reverse<Ring>>,
    version: Vec<u64>,
    rng: ChaCha8Rng,
    rate: f64,
}

impl Clocks {
    /// Redraws the clock of `site` for `n` active particles from time `now`;
    /// valid at any moment by memorylessness.
    fn reset(&mut self, site: usize, n: u32, now: f64) {
        self.version[site] += 1;
        if n > 0 {
            let u: f64 = self.rng.random();
            let t = now - (1.0 - u).ln() / (self.rate * f64::from(n));
            self.heap.push(Reverse(Ring { t, site, version: self.version[site] }));
        }
    }
}

fn active(cfg: &Configuration, idx: usize) -> u32 {
    let c = cfg.codes()[idx];
    if c > 0 {
        c as u32
    } else {
        0
    }
}

/// Runs the clocks until absorption or `t_max`. Clock randomness comes from
/// `clock_seed` alone; instructions come from `field`, so an absorbed run ends
/// in the engine's stable configuration for the same field.
pub fn ct_run(cfg: &Configuration, field: &InstructionField, clock_seed: u64, t_max: f64, record: bool) -> Result<CtRun> {
    let lambda = match field.lambda() {
        SleepRate::Finite(l) => l,
        SleepRate::Infinite => return Err(Error::WrongModel("continuous time needs a finite sleep rate".into())),
    };
    let lattice = cfg.lattice().clone();
    let mut e = Engine::new(cfg.clone(), field.clone())?;
    let mut clocks = Clocks {
        heap: BinaryHeap::new(),
        version: vec![0; lattice.len()],
        rng: stream(clock_seed),
        rate: 1.0 + lambda,
    };
    for i in lattice.interior() {
        clocks.reset(i, active(e.config(), i), 0.0);
    }
    let mut events = Vec::new();
    let mut now = 0.0;
    let mut status = RunStatus::Absorbed;
    while let Some(Reverse(ring)) = clocks.heap.pop() {
        if ring.version != clocks.version[ring.site] {
            continue;
        }
        if ring.t > t_max {
            status = RunStatus::Unabsorbed;
            now = t_max;
            break;
        }
        now = ring.t;
        let x = ring.site;
        let landing = match e.peek(x) {
            Instruction::Jump(d) => e.neighbour(x, d),
            Instruction::Sleep => None,
        };
        let ins = e.topple(x, ToppleMode::Legal)?;
        if record {
            events.push(TimedEvent { t: now, kind: "ring", id: lattice.coords(x), instruction: Some(ins) });
        }
        clocks.reset(x, active(e.config(), x), now);
        if let Some(y) = landing {
            if lattice.is_interior(y) {
                clocks.reset(y, active(e.config(), y), now);
            }
        }
    }
    let exits = e.exits();
    let (config, odometer) = e.into_parts();
    Ok(CtRun { status, time: now, config, odometer, exits, events })
}
