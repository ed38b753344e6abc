use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Occupation of one site: nothing, one sleeping particle, or `n >= 1` active
/// particles. Ordered as `Empty < Sleeping < Active(1) < Active(2) < ...`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SiteState {
    Empty,
    Sleeping,
    Active(u32),
}

/// Flat integer encoding used by configurations: `-1` sleeping, `0` empty,
/// `n >= 1` active. Raw integer comparison is *not* the site order.
pub(crate) mod code {
    pub const EMPTY: i32 = 0;
    pub const SLEEPING: i32 = -1;

    #[inline(always)]
    pub fn add(c: i32) -> i32 {
        if c == SLEEPING {
            2
        } else {
            c + 1
        }
    }

    /// Caller guarantees `c != EMPTY`.
    #[inline(always)]
    pub fn remove(c: i32) -> i32 {
        if c == SLEEPING || c == 1 {
            EMPTY
        } else {
            c - 1
        }
    }

    /// Caller guarantees `c != EMPTY`.
    #[inline(always)]
    pub fn sleep(c: i32) -> i32 {
        if c == 1 {
            SLEEPING
        } else {
            c
        }
    }

    #[inline(always)]
    pub fn count(c: i32) -> u32 {
        if c == SLEEPING {
            1
        } else {
            c as u32
        }
    }

    /// Position in the site order: empty 0, sleeping 1, active n at n + 1.
    #[inline(always)]
    pub fn rank(c: i32) -> i64 {
        if c == SLEEPING {
            1
        } else if c == EMPTY {
            0
        } else {
            c as i64 + 1
        }
    }
}

impl SiteState {
    pub fn active(n: u32) -> Result<Self> {
        if n == 0 {
            Err(Error::InvalidSpec("Active(n) requires n >= 1".into()))
        } else {
            Ok(SiteState::Active(n))
        }
    }

    pub fn particle_count(self) -> u32 {
        match self {
            SiteState::Empty => 0,
            SiteState::Sleeping => 1,
            SiteState::Active(n) => n,
        }
    }

    pub fn is_active(self) -> bool {
        matches!(self, SiteState::Active(_))
    }

    /// `A + S -> 2A` when the site holds a sleeper.
    pub fn add_particle(self) -> SiteState {
        SiteState::from_code(code::add(self.to_code()))
    }

    /// Lone active particle falls asleep; otherwise the attempt is overridden.
    pub fn try_sleep(self) -> Result<SiteState> {
        match self {
            SiteState::Empty => Err(Error::DegenerateOperand),
            s => Ok(SiteState::from_code(code::sleep(s.to_code()))),
        }
    }

    pub fn remove_particle(self) -> Result<SiteState> {
        match self {
            SiteState::Empty => Err(Error::DegenerateOperand),
            s => Ok(SiteState::from_code(code::remove(s.to_code()))),
        }
    }

    pub fn to_code(self) -> i32 {
        match self {
            SiteState::Empty => code::EMPTY,
            SiteState::Sleeping => code::SLEEPING,
            SiteState::Active(n) => n as i32,
        }
    }

    pub fn from_code(c: i32) -> SiteState {
        match c {
            code::EMPTY => SiteState::Empty,
            code::SLEEPING => SiteState::Sleeping,
            n if n > 0 => SiteState::Active(n as u32),
            other => panic!("invalid site code {other}"),
        }
    }

    pub fn try_from_code(c: i32) -> Result<SiteState> {
        if c < code::SLEEPING {
            Err(Error::Parse(format!("invalid site value {c}")))
        } else {
            Ok(SiteState::from_code(c))
        }
    }
}

impl PartialOrd for SiteState {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SiteState {
    fn cmp(&self, other: &Self) -> Ordering {
        code::rank(self.to_code()).cmp(&code::rank(other.to_code()))
    }
}

impl fmt::Display for SiteState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SiteState::Empty => write!(f, "0"),
            SiteState::Sleeping => write!(f, "s"),
            SiteState::Active(n) => write!(f, "{n}"),
        }
    }
}
