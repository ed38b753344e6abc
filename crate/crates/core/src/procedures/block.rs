//! Single-block exit counts: particles fed one at a time into the centre of a
//! block of `2K - 1` sites, exits parked at two buffer cells.

use crate::engine::{Engine, Status, Strategy, ToppleMode};
use crate::error::{Error, Result};
use crate::field::InstructionField;
use crate::model::{Boundary, Configuration, Lattice, Volume};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockFunctions {
    pub k: u32,
    /// Particles initially in the block.
    pub initial: u64,
    pub l: Vec<u64>,
    pub r: Vec<u64>,
    pub s: Vec<u64>,
    pub t: Vec<u64>,
}

impl BlockFunctions {
    /// Checks the sum identity, monotonicity, the sleeper bound and the
    /// bounded increase of `L`. Returns the first violation found.
    pub fn check(&self) -> std::result::Result<(), String> {
        let k = u64::from(self.k);
        for m in 0..self.t.len() {
            if self.t[m] != self.l[m] + self.r[m] + self.s[m] {
                return Err(format!("T != L + R + S at m = {m}"));
            }
            if self.t[m] != m as u64 + self.initial {
                return Err(format!("T != m + initial at m = {m}"));
            }
            if self.s[m] > 2 * k - 1 {
                return Err(format!("S({m}) = {} exceeds 2K - 1", self.s[m]));
            }
            if m > 0 && (self.l[m] < self.l[m - 1] || self.r[m] < self.r[m - 1]) {
                return Err(format!("exit counts decrease at m = {m}"));
            }
        }
        // L(m') - L(m) is largest over m for fixed m', so a running minimum
        // of L(m) - m suffices.
        let mut best = i64::MAX;
        for m2 in 0..self.l.len() {
            if best != i64::MAX && self.l[m2] as i64 - m2 as i64 > best + 2 * k as i64 {
                return Err(format!("L increases too fast before m' = {m2}"));
            }
            best = best.min(self.l[m2] as i64 - m2 as i64);
        }
        Ok(())
    }
}

/// The block `[-(K-1), K-1]` with buffer cells at `-K` and `K`.
pub fn block_lattice(k: u32) -> Result<Lattice> {
    if k < 2 {
        return Err(Error::InvalidSpec("block half-width K must be at least 2".into()));
    }
    Lattice::cube(1, k, Boundary::Kill)
}

/// Computes `L, R, S, T` for `m = 0..=m_max`. `block` lives on
/// [`block_lattice`] and must leave the buffer cells empty. `budget` bounds
/// the topplings of each restabilization.
pub fn block_functions(block: &Configuration, field: &InstructionField, m_max: u64, budget: u64) -> Result<BlockFunctions> {
    let lattice = block.lattice().clone();
    let k = lattice.upper()[0];
    if lattice.dim() != 1 || lattice.lower()[0] != -k || block_lattice(k as u32).ok().as_ref() != Some(&lattice) {
        return Err(Error::InvalidSpec("block configuration must live on the block lattice".into()));
    }
    let left = lattice.index_of(&[-k]).expect("buffer");
    let right = lattice.index_of(&[k]).expect("buffer");
    if block.count(left) + block.count(right) > 0 {
        return Err(Error::InvalidSpec("buffer cells must start empty".into()));
    }
    let inner = Volume::filter(&lattice, |x| x[0].abs() < k);
    let source = lattice.origin().expect("origin");
    let initial = block.total_particles();
    let mut e = Engine::new(block.clone(), field.clone())?;
    let mut out = BlockFunctions { k: k as u32, initial, l: Vec::new(), r: Vec::new(), s: Vec::new(), t: Vec::new() };
    for m in 0..=m_max {
        if m > 0 {
            e.add_particles(source, 1);
        }
        if e.stabilize(&inner, Strategy::ExhaustSiteThenNext, ToppleMode::Legal, budget)? == Status::BudgetExceeded {
            return Err(Error::BudgetExceeded(budget));
        }
        let c = e.config();
        let (l, r) = (u64::from(c.count(left)), u64::from(c.count(right)));
        let s = c.sleepers_in(&inner);
        out.l.push(l);
        out.r.push(r);
        out.s.push(s);
        out.t.push(l + r + s);
    }
    Ok(out)
}
