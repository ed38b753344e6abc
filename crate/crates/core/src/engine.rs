//! Site-wise toppling engine: topplings in four legality modes, stabilization
//! under interchangeable strategies, odometers, and weak/strong stabilization
//! relative to the origin.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Instruction, InstructionField};
use crate::model::{code, Configuration, Lattice, SiteState, Step, Volume};
use crate::rng::{derive_seed, stream};
use crate::trace::TraceEvent;

pub const DEFAULT_BUDGET: u64 = 10_000_000;

const OUTSIDE: u32 = u32::MAX;
const NOT_POOLED: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ToppleMode {
    /// Site holds at least one active particle.
    Legal,
    /// Site holds any particle; a sleeper is woken before toppling.
    Acceptable,
    /// Legal, except the origin needs two active particles.
    WLegal,
    /// Legal, except any particle at the origin qualifies.
    SLegal,
}

impl ToppleMode {
    #[inline(always)]
    fn admits(self, c: i32, at_origin: bool) -> bool {
        match self {
            ToppleMode::Legal => c > 0,
            ToppleMode::Acceptable => c != code::EMPTY,
            ToppleMode::WLegal => {
                if at_origin {
                    c >= 2
                } else {
                    c > 0
                }
            }
            ToppleMode::SLegal => {
                if at_origin {
                    c != code::EMPTY
                } else {
                    c > 0
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    /// Repeated passes in lexicographic site order, one toppling per unstable site per pass.
    SweepLowToHigh,
    /// Uniform choice among currently unstable sites, from its own seeded stream.
    RandomUnstable(u64),
    /// First-in first-out work list, one toppling per visit.
    QueueFifo,
    /// Topple a site until it is stable, then move to the most recently destabilised site.
    ExhaustSiteThenNext,
}

impl Strategy {
    pub const ALL_DETERMINISTIC: [Strategy; 3] =
        [Strategy::SweepLowToHigh, Strategy::QueueFifo, Strategy::ExhaustSiteThenNext];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Stable,
    BudgetExceeded,
}

/// Injected defects used to check that the validator notices broken engines.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    SkipOdometerIncrement,
}

/// Per-site toppling counts `m` and jump-only counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Odometer {
    counts: Vec<u64>,
    jumps: Vec<u64>,
}

impl Odometer {
    pub fn zeros(len: usize) -> Self {
        Odometer { counts: vec![0; len], jumps: vec![0; len] }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn get(&self, idx: usize) -> u64 {
        self.counts[idx]
    }

    /// Number of Jump instructions executed per site.
    pub fn jump_odometer(&self) -> &[u64] {
        &self.jumps
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn le(&self, other: &Odometer) -> bool {
        self.counts.len() == other.counts.len() && self.counts.iter().zip(&other.counts).all(|(a, b)| a <= b)
    }

    /// Pointwise comparison through coordinates; sites missing from `other` count as zero.
    pub fn le_on(&self, lattice: &Lattice, other: &Odometer, other_lattice: &Lattice) -> bool {
        (0..self.counts.len()).all(|i| {
            let c = self.counts[i];
            c == 0
                || other_lattice
                    .index_of(&lattice.coords(i))
                    .is_some_and(|j| c <= other.counts[j])
        })
    }

    /// Text dump: header line, then `x0 .. count jumpCount` for visited sites.
    pub fn dump(&self, lattice: &Lattice) -> String {
        let mut s = format!("arw-snapshot d={} shape={}\n", lattice.dim(), lattice.describe());
        for i in 0..self.counts.len() {
            if self.counts[i] == 0 {
                continue;
            }
            for x in lattice.coords(i) {
                let _ = write!(s, "{x} ");
            }
            let _ = writeln!(s, "{} {}", self.counts[i], self.jumps[i]);
        }
        s
    }

    pub fn parse_dump(text: &str) -> Result<(Lattice, Odometer)> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let head = lines.next().ok_or_else(|| Error::Parse("empty odometer dump".into()))?;
        let lattice = crate::model::parse_header(head)?;
        let d = lattice.dim();
        let mut odo = Odometer::zeros(lattice.len());
        for line in lines {
            let nums: Vec<i64> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad odometer line '{line}'"))))
                .collect::<Result<_>>()?;
            if nums.len() != d + 2 || nums[d] < 0 || nums[d + 1] < 0 || nums[d + 1] > nums[d] {
                return Err(Error::Parse(format!("bad odometer line '{line}'")));
            }
            let i = lattice
                .index_of(&nums[..d])
                .ok_or_else(|| Error::Parse(format!("site outside shape in '{line}'")))?;
            odo.counts[i] = nums[d] as u64;
            odo.jumps[i] = nums[d + 1] as u64;
        }
        Ok((lattice, odo))
    }
}

/// Result of a stand-alone stabilization.
#[derive(Debug, Clone)]
pub struct Stabilized {
    pub config: Configuration,
    pub odometer: Odometer,
    pub status: Status,
    pub exits: u64,
    pub topplings: u64,
}

/// Rounds needed by the alternating weak-stabilization procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuccessiveWeak {
    pub rounds_to_stable: u64,
    pub rounds_to_strong: u64,
    /// State of the origin once ordinary stability was first reached.
    pub final_at_origin: SiteState,
    pub status: Status,
}

/// Configuration, odometer and field cursor for one run.
#[derive(Debug, Clone)]
pub struct Engine {
    cfg: Configuration,
    field: InstructionField,
    keys: Vec<u64>,
    nbr: Vec<u32>,
    ndir: usize,
    toppleable: Vec<bool>,
    origin: Option<usize>,
    odo: Odometer,
    exits: u64,
    topplings: u64,
    trace: Option<Vec<TraceEvent>>,
    fault: Option<Fault>,
}

impl Engine {
    pub fn new(cfg: Configuration, field: InstructionField) -> Result<Self> {
        let lattice = cfg.lattice();
        if lattice.dim() != field.jumps().dim() {
            return Err(Error::InvalidSpec(format!(
                "lattice has dimension {} but jump kernel has dimension {}",
                lattice.dim(),
                field.jumps().dim()
            )));
        }
        if lattice.len() >= OUTSIDE as usize {
            return Err(Error::InvalidSpec("lattice too large".into()));
        }
        let ndir = 2 * lattice.dim();
        let len = lattice.len();
        let mut nbr = Vec::with_capacity(len * ndir);
        for i in 0..len {
            for d in 0..ndir {
                nbr.push(match lattice.step(i, crate::model::Direction(d as u8)) {
                    Step::Site(j) => j as u32,
                    Step::Outside => OUTSIDE,
                });
            }
        }
        let toppleable = (0..len).map(|i| lattice.is_interior(i)).collect();
        let keys = field.keys_for(lattice);
        let origin = lattice.origin();
        let mut e = Engine {
            cfg,
            field,
            keys,
            nbr,
            ndir,
            toppleable,
            origin,
            odo: Odometer::zeros(len),
            exits: 0,
            topplings: 0,
            trace: None,
            fault: None,
        };
        if e.field.is_infinite_sleep() {
            for i in 0..len {
                e.normalize(i);
            }
        }
        Ok(e)
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    #[doc(hidden)]
    pub fn inject_fault(&mut self, fault: Fault) {
        self.fault = Some(fault);
    }

    pub fn config(&self) -> &Configuration {
        &self.cfg
    }

    pub fn lattice(&self) -> &Lattice {
        self.cfg.lattice()
    }

    pub fn field(&self) -> &InstructionField {
        &self.field
    }

    pub fn odometer(&self) -> &Odometer {
        &self.odo
    }

    pub fn exits(&self) -> u64 {
        self.exits
    }

    pub fn topplings(&self) -> u64 {
        self.topplings
    }

    pub fn origin(&self) -> Option<usize> {
        self.origin
    }

    pub fn trace(&self) -> Option<&[TraceEvent]> {
        self.trace.as_deref()
    }

    pub fn take_trace(&mut self) -> Vec<TraceEvent> {
        self.trace.as_mut().map(std::mem::take).unwrap_or_default()
    }

    pub fn into_parts(self) -> (Configuration, Odometer) {
        (self.cfg, self.odo)
    }

    /// Next instruction that would be executed at `idx`.
    pub fn peek(&self, idx: usize) -> Instruction {
        self.field.instruction_for_key(self.keys[idx], self.odo.counts[idx] + 1)
    }

    /// Neighbour of `idx` in a direction, `None` when the jump leaves the domain.
    pub fn neighbour(&self, idx: usize, dir: crate::model::Direction) -> Option<usize> {
        let y = self.nbr[idx * self.ndir + dir.0 as usize];
        (y != OUTSIDE).then_some(y as usize)
    }

    /// Adds `n` active particles at a stored site.
    pub fn add_particles(&mut self, idx: usize, n: u32) {
        self.cfg.add_active(idx, n);
        if self.field.is_infinite_sleep() {
            self.normalize(idx);
        }
    }

    /// Overwrites a site. Intended for building instances, not for runs in progress.
    pub fn set_site(&mut self, idx: usize, s: SiteState) {
        self.cfg.set(idx, s);
        if self.field.is_infinite_sleep() {
            self.normalize(idx);
        }
    }

    #[inline(always)]
    fn normalize(&mut self, idx: usize) {
        if self.cfg.cells[idx] == 1 {
            self.cfg.cells[idx] = code::SLEEPING;
        }
    }

    #[inline(always)]
    fn is_origin(&self, idx: usize) -> bool {
        self.origin == Some(idx)
    }

    /// Whether `idx` may be toppled in `mode` right now.
    #[inline(always)]
    pub fn is_unstable(&self, idx: usize, mode: ToppleMode) -> bool {
        mode.admits(self.cfg.cells[idx], self.is_origin(idx))
    }

    /// Executes the next instruction at `idx` after checking the mode's precondition.
    pub fn topple(&mut self, idx: usize, mode: ToppleMode) -> Result<Instruction> {
        if idx >= self.toppleable.len() || !self.toppleable[idx] {
            return Err(Error::OutOfDomain(idx));
        }
        if !self.is_unstable(idx, mode) {
            return Err(Error::IllegalToppling { site: self.lattice().coords(idx), mode });
        }
        Ok(self.topple_raw(idx).0)
    }

    /// Executes the next instruction at `idx`. Returns the instruction and the
    /// landing site of a jump that stayed inside the domain.
    #[inline(always)]
    fn topple_raw(&mut self, x: usize) -> (Instruction, Option<usize>) {
        let j = self.odo.counts[x] + 1;
        let ins = self.field.instruction_for_key(self.keys[x], j);
        if self.fault != Some(Fault::SkipOdometerIncrement) {
            self.odo.counts[x] = j;
        }
        self.topplings += 1;
        let c = self.cfg.cells[x];
        let mut landed = None;
        match ins {
            Instruction::Sleep => {
                self.cfg.cells[x] = code::sleep(c);
            }
            Instruction::Jump(d) => {
                self.odo.jumps[x] += 1;
                self.cfg.cells[x] = code::remove(c);
                let y = self.nbr[x * self.ndir + d.0 as usize];
                if y == OUTSIDE {
                    self.exits += 1;
                    self.cfg.total -= 1;
                } else {
                    let y = y as usize;
                    self.cfg.cells[y] = code::add(self.cfg.cells[y]);
                    landed = Some(y);
                }
            }
        }
        if self.field.is_infinite_sleep() {
            self.normalize(x);
            if let Some(y) = landed {
                self.normalize(y);
            }
        }
        if let Some(t) = self.trace.as_mut() {
            let step = t.len() as u64 + 1;
            let site = self.cfg.lattice().coords(x);
            t.push(TraceEvent { step, site, instruction: ins, state: self.cfg.cells[x] });
        }
        (ins, landed)
    }

    fn check_volume(&self, vol: &Volume) -> Result<()> {
        if vol.domain_len() != self.cfg.lattice().len() {
            return Err(Error::InvalidVolume("volume belongs to a different lattice".into()));
        }
        Ok(())
    }

    /// Topples unstable sites of `vol` until none remain or `budget` topplings
    /// have been spent in this call.
    pub fn stabilize(&mut self, vol: &Volume, strategy: Strategy, mode: ToppleMode, budget: u64) -> Result<Status> {
        self.check_volume(vol)?;
        Ok(match strategy {
            Strategy::ExhaustSiteThenNext => self.run_exhaust(vol, mode, budget),
            Strategy::QueueFifo => self.run_fifo(vol, mode, budget),
            Strategy::SweepLowToHigh => self.run_sweep(vol, mode, budget),
            Strategy::RandomUnstable(seed) => self.run_random(vol, mode, budget, seed),
        })
    }

    fn run_exhaust(&mut self, vol: &Volume, mode: ToppleMode, budget: u64) -> Status {
        let mut queued = vec![false; self.cfg.cells.len()];
        let mut stack: Vec<usize> = Vec::new();
        for &x in vol.sites().iter().rev() {
            if self.is_unstable(x, mode) {
                queued[x] = true;
                stack.push(x);
            }
        }
        let mut spent = 0u64;
        while let Some(x) = stack.pop() {
            queued[x] = false;
            while self.is_unstable(x, mode) {
                if spent == budget {
                    return Status::BudgetExceeded;
                }
                spent += 1;
                if let (_, Some(y)) = self.topple_raw(x) {
                    if y != x && !queued[y] && vol.contains(y) && self.is_unstable(y, mode) {
                        queued[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        Status::Stable
    }

    fn run_fifo(&mut self, vol: &Volume, mode: ToppleMode, budget: u64) -> Status {
        let mut queued = vec![false; self.cfg.cells.len()];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &x in vol.sites() {
            if self.is_unstable(x, mode) {
                queued[x] = true;
                queue.push_back(x);
            }
        }
        let mut spent = 0u64;
        while let Some(x) = queue.pop_front() {
            queued[x] = false;
            if !self.is_unstable(x, mode) {
                continue;
            }
            if spent == budget {
                return Status::BudgetExceeded;
            }
            spent += 1;
            let (_, landed) = self.topple_raw(x);
            if self.is_unstable(x, mode) {
                queued[x] = true;
                queue.push_back(x);
            }
            if let Some(y) = landed {
                if !queued[y] && vol.contains(y) && self.is_unstable(y, mode) {
                    queued[y] = true;
                    queue.push_back(y);
                }
            }
        }
        Status::Stable
    }

    fn run_sweep(&mut self, vol: &Volume, mode: ToppleMode, budget: u64) -> Status {
        let mut spent = 0u64;
        loop {
            let mut any = false;
            for &x in vol.sites() {
                if self.is_unstable(x, mode) {
                    any = true;
                    if spent == budget {
                        return Status::BudgetExceeded;
                    }
                    spent += 1;
                    self.topple_raw(x);
                }
            }
            if !any {
                return Status::Stable;
            }
        }
    }

    fn run_random(&mut self, vol: &Volume, mode: ToppleMode, budget: u64, seed: u64) -> Status {
        let mut rng = stream(derive_seed(seed, &[0x5EED]));
        let mut pos = vec![NOT_POOLED; self.cfg.cells.len()];
        let mut pool: Vec<usize> = Vec::new();
        for &x in vol.sites() {
            if self.is_unstable(x, mode) {
                pos[x] = pool.len() as u32;
                pool.push(x);
            }
        }
        let mut spent = 0u64;
        while !pool.is_empty() {
            if spent == budget {
                return Status::BudgetExceeded;
            }
            let x = pool[rng.random_range(0..pool.len())];
            spent += 1;
            let (_, landed) = self.topple_raw(x);
            self.refresh_pool(x, mode, &mut pool, &mut pos);
            if let Some(y) = landed {
                if vol.contains(y) {
                    self.refresh_pool(y, mode, &mut pool, &mut pos);
                }
            }
        }
        Status::Stable
    }

    fn refresh_pool(&self, x: usize, mode: ToppleMode, pool: &mut Vec<usize>, pos: &mut [u32]) {
        let unstable = self.is_unstable(x, mode);
        let p = pos[x];
        if unstable && p == NOT_POOLED {
            pos[x] = pool.len() as u32;
            pool.push(x);
        } else if !unstable && p != NOT_POOLED {
            let last = *pool.last().expect("pooled site");
            pool.swap_remove(p as usize);
            if last != x {
                pos[last] = p;
            }
            pos[x] = NOT_POOLED;
        }
    }

    fn require_origin(&self, vol: &Volume) -> Result<usize> {
        match self.origin {
            Some(o) if vol.contains(o) => Ok(o),
            _ => Err(Error::InvalidVolume("the origin must belong to the volume".into())),
        }
    }

    pub fn weak_stabilize(&mut self, vol: &Volume, strategy: Strategy, budget: u64) -> Result<Status> {
        self.require_origin(vol)?;
        self.stabilize(vol, strategy, ToppleMode::WLegal, budget)
    }

    pub fn strong_stabilize(&mut self, vol: &Volume, strategy: Strategy, budget: u64) -> Result<Status> {
        self.require_origin(vol)?;
        self.stabilize(vol, strategy, ToppleMode::SLegal, budget)
    }

    /// Reaches stability and then strong stability by alternating weak
    /// stabilizations with topplings at the origin. Each round after the first
    /// topples the origin until a Jump is executed, then weakly stabilizes.
    pub fn successive_weak(&mut self, vol: &Volume, budget: u64) -> Result<SuccessiveWeak> {
        let o = self.require_origin(vol)?;
        let start = self.topplings;
        let left = |e: &Engine| budget.saturating_sub(e.topplings - start);
        let mut round = 1u64;
        let mut stable_round = None;
        let mut final_at_origin = SiteState::Empty;
        let budget_hit = |e: &Engine, round: u64, stable: Option<u64>, at: SiteState| SuccessiveWeak {
            rounds_to_stable: stable.unwrap_or(round),
            rounds_to_strong: round,
            final_at_origin: if stable.is_some() { at } else { e.cfg.get(o) },
            status: Status::BudgetExceeded,
        };
        if self.stabilize(vol, Strategy::ExhaustSiteThenNext, ToppleMode::WLegal, budget)? == Status::BudgetExceeded {
            return Ok(budget_hit(self, round, stable_round, final_at_origin));
        }
        if self.cfg.cells[o] <= 0 {
            stable_round = Some(round);
            final_at_origin = self.cfg.get(o);
        }
        while self.cfg.cells[o] != code::EMPTY {
            round += 1;
            loop {
                if left(self) == 0 {
                    return Ok(budget_hit(self, round, stable_round, final_at_origin));
                }
                let before = self.cfg.cells[o];
                let (ins, _) = self.topple_raw(o);
                if ins.is_jump() {
                    break;
                }
                if before == 1 && stable_round.is_none() {
                    stable_round = Some(round);
                    final_at_origin = SiteState::Sleeping;
                }
            }
            let rest = left(self);
            if self.stabilize(vol, Strategy::ExhaustSiteThenNext, ToppleMode::WLegal, rest)? == Status::BudgetExceeded {
                return Ok(budget_hit(self, round, stable_round, final_at_origin));
            }
            if self.cfg.cells[o] <= 0 && stable_round.is_none() {
                stable_round = Some(round);
                final_at_origin = self.cfg.get(o);
            }
        }
        Ok(SuccessiveWeak {
            rounds_to_stable: stable_round.unwrap_or(round),
            rounds_to_strong: round,
            final_at_origin,
            status: Status::Stable,
        })
    }
}

/// Stabilizes a copy of `cfg` in `vol`.
pub fn stabilize(
    cfg: &Configuration,
    vol: &Volume,
    field: &InstructionField,
    strategy: Strategy,
    mode: ToppleMode,
    budget: u64,
) -> Result<Stabilized> {
    let mut e = Engine::new(cfg.clone(), field.clone())?;
    let status = e.stabilize(vol, strategy, mode, budget)?;
    let exits = e.exits;
    let topplings = e.topplings;
    let (config, odometer) = e.into_parts();
    Ok(Stabilized { config, odometer, status, exits, topplings })
}

pub fn weak_stabilize(cfg: &Configuration, vol: &Volume, field: &InstructionField, budget: u64) -> Result<Stabilized> {
    let e = Engine::new(cfg.clone(), field.clone())?;
    e.require_origin(vol)?;
    stabilize(cfg, vol, field, Strategy::ExhaustSiteThenNext, ToppleMode::WLegal, budget)
}

pub fn strong_stabilize(cfg: &Configuration, vol: &Volume, field: &InstructionField, budget: u64) -> Result<Stabilized> {
    let e = Engine::new(cfg.clone(), field.clone())?;
    e.require_origin(vol)?;
    stabilize(cfg, vol, field, Strategy::ExhaustSiteThenNext, ToppleMode::SLegal, budget)
}

pub fn successive_weak(
    cfg: &Configuration,
    vol: &Volume,
    field: &InstructionField,
    budget: u64,
) -> Result<SuccessiveWeak> {
    Engine::new(cfg.clone(), field.clone())?.successive_weak(vol, budget)
}
