//! The instruction field: per-site stacks of Sleep/Jump instructions.
//!
//! Stacks are never stored. Instruction `j` at site `x` is recomputed from
//! `(seed, x, j)`, so every consumer sees the same field regardless of the
//! order in which it reveals entries.

use std::collections::HashMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::model::{Direction, JumpDistribution, Lattice, ModelParams, SleepRate};
use crate::rng::{mix64, site_key, GOLDEN_GAMMA};

const DIRECTION_SALT: u64 = 0xD1B5_4A32_D192_ED03;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Instruction {
    Sleep,
    Jump(Direction),
}

impl Instruction {
    pub fn is_jump(self) -> bool {
        matches!(self, Instruction::Jump(_))
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::Sleep => write!(f, "sleep"),
            Instruction::Jump(d) => write!(f, "jump{d}"),
        }
    }
}

impl Serialize for Instruction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstructionField {
    seed: u64,
    params: ModelParams,
    sleep_threshold: u64,
    infinite: bool,
}

impl InstructionField {
    pub fn new(seed: u64, params: ModelParams) -> Self {
        let (sleep_threshold, infinite) = match params.lambda {
            SleepRate::Infinite => (0, true),
            SleepRate::Finite(_) => {
                let q = params.sleep_prob();
                ((q * 18_446_744_073_709_551_616.0) as u64, false)
            }
        };
        InstructionField { seed, params, sleep_threshold, infinite }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn jumps(&self) -> &JumpDistribution {
        &self.params.jumps
    }

    pub fn lambda(&self) -> SleepRate {
        self.params.lambda
    }

    pub fn is_infinite_sleep(&self) -> bool {
        self.infinite
    }

    pub fn key(&self, coords: &[i64]) -> u64 {
        site_key(self.seed, coords)
    }

    /// Instruction `j >= 1` at the site with coordinates `coords`.
    pub fn instruction_at(&self, coords: &[i64], j: u64) -> Instruction {
        self.instruction_for_key(self.key(coords), j)
    }

    #[inline(always)]
    pub fn instruction_for_key(&self, key: u64, j: u64) -> Instruction {
        let u = mix64(key.wrapping_add(j.wrapping_mul(GOLDEN_GAMMA)));
        if !self.infinite && u < self.sleep_threshold {
            Instruction::Sleep
        } else {
            Instruction::Jump(self.params.jumps.sample(mix64(u ^ DIRECTION_SALT)))
        }
    }

    /// Site keys for every stored site of a lattice, in storage order.
    pub fn keys_for(&self, lattice: &Lattice) -> Vec<u64> {
        (0..lattice.len()).map(|i| self.key(&lattice.coords(i))).collect()
    }
}

/// Reads a field while remembering, per site, how deep it has been revealed.
#[derive(Debug, Clone)]
pub struct RevealLog<'a> {
    field: &'a InstructionField,
    revealed: HashMap<Vec<i64>, u64>,
}

impl<'a> RevealLog<'a> {
    pub fn new(field: &'a InstructionField) -> Self {
        RevealLog { field, revealed: HashMap::new() }
    }

    pub fn reveal(&mut self, coords: &[i64], j: u64) -> Instruction {
        let r = self.revealed.entry(coords.to_vec()).or_insert(0);
        *r = (*r).max(j);
        self.field.instruction_at(coords, j)
    }

    pub fn revealed(&self, coords: &[i64]) -> u64 {
        self.revealed.get(coords).copied().unwrap_or(0)
    }

    pub fn total_revealed(&self) -> u64 {
        self.revealed.values().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(lambda: SleepRate, jumps: JumpDistribution) -> InstructionField {
        InstructionField::new(42, ModelParams::new(lambda, jumps))
    }

    #[test]
    fn deterministic() {
        let f = field(SleepRate::Finite(1.0), JumpDistribution::symmetric(2));
        for j in 1..50 {
            assert_eq!(f.instruction_at(&[3, -1], j), f.instruction_at(&[3, -1], j));
        }
    }

    #[test]
    fn infinite_rate_yields_only_jumps() {
        let f = field(SleepRate::Infinite, JumpDistribution::symmetric(1));
        assert!((1..10_000).all(|j| f.instruction_at(&[0], j).is_jump()));
    }

    #[test]
    fn sleep_frequency_matches_q() {
        let f = field(SleepRate::Finite(1.0), JumpDistribution::symmetric(1));
        let n = 1_000_000u64;
        let sleeps = (0..n)
            .filter(|&k| f.instruction_at(&[(k % 1000) as i64], k / 1000 + 1) == Instruction::Sleep)
            .count();
        let freq = sleeps as f64 / n as f64;
        assert!((0.498..=0.502).contains(&freq), "{freq}");
    }

    #[test]
    fn direction_marginals_follow_kernel() {
        let j = JumpDistribution::from_weights(vec![0.4, 0.2, 0.3, 0.1]).unwrap();
        let f = field(SleepRate::Finite(0.25), j.clone());
        let n = 400_000u64;
        let mut counts = [0u64; 5];
        for k in 0..n {
            match f.instruction_at(&[k as i64, 7], 1) {
                Instruction::Sleep => counts[4] += 1,
                Instruction::Jump(d) => counts[d.0 as usize] += 1,
            }
        }
        // jump probability p(y)/(1+lambda), sleep lambda/(1+lambda)
        let expect = [0.4 / 1.25, 0.2 / 1.25, 0.3 / 1.25, 0.1 / 1.25, 0.2];
        for (c, e) in counts.iter().zip(expect) {
            let p = *c as f64 / n as f64;
            let sd = (e * (1.0 - e) / n as f64).sqrt();
            assert!((p - e).abs() < 5.0 * sd, "{p} vs {e}");
        }
    }

    #[test]
    fn reveal_log_tracks_depth() {
        let f = field(SleepRate::Finite(1.0), JumpDistribution::symmetric(1));
        let mut log = RevealLog::new(&f);
        log.reveal(&[2], 3);
        log.reveal(&[2], 1);
        assert_eq!(log.revealed(&[2]), 3);
        assert_eq!(log.revealed(&[5]), 0);
        assert_eq!(log.reveal(&[4], 2), f.instruction_at(&[4], 2));
    }
}
