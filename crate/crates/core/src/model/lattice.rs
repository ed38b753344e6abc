use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Particles jumping out of the box are destroyed and counted as exits.
    Kill,
    /// Jumps that would leave the box are suppressed; the particle stays put.
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    Box(Boundary),
    Torus,
    /// Interior box plus a one-site parking shell. Shell sites receive
    /// particles but are never toppled.
    Window,
}

/// Nearest-neighbour direction `±e_axis`, encoded as `2 * axis + (0 for +, 1 for -)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Direction(pub u8);

impl Direction {
    pub fn new(axis: usize, positive: bool) -> Self {
        Direction((2 * axis + usize::from(!positive)) as u8)
    }

    #[inline(always)]
    pub fn axis(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline(always)]
    pub fn positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn sign(self) -> i64 {
        if self.positive() {
            1
        } else {
            -1
        }
    }

    pub fn reverse(self) -> Direction {
        Direction(self.0 ^ 1)
    }

    pub fn offset(self, dim: usize) -> Vec<i64> {
        let mut v = vec![0; dim];
        v[self.axis()] = self.sign();
        v
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}e{}", if self.positive() { '+' } else { '-' }, self.axis() + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Site(usize),
    Outside,
}

/// A finite piece of `Z^d` with flat row-major storage (axis 0 slowest).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    shape: Shape,
    lo: Vec<i64>,
    hi: Vec<i64>,
    store_lo: Vec<i64>,
    extent: Vec<usize>,
    stride: Vec<usize>,
    len: usize,
}

impl Lattice {
    fn build(shape: Shape, lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::InvalidSpec("lattice bounds must have matching, positive dimension".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(Error::InvalidSpec(format!("empty lattice bounds {lo:?}..{hi:?}")));
        }
        let pad = i64::from(shape == Shape::Window);
        let store_lo: Vec<i64> = lo.iter().map(|&a| a - pad).collect();
        let extent: Vec<usize> = lo
            .iter()
            .zip(&hi)
            .map(|(&a, &b)| (b - a + 1 + 2 * pad) as usize)
            .collect();
        let mut stride = vec![1usize; extent.len()];
        for a in (0..extent.len().saturating_sub(1)).rev() {
            stride[a] = stride[a + 1] * extent[a + 1];
        }
        let len = extent.iter().product();
        Ok(Lattice { shape, lo, hi, store_lo, extent, stride, len })
    }

    /// `{-radius..radius}^dim` with the given boundary.
    pub fn cube(dim: usize, radius: u32, boundary: Boundary) -> Result<Self> {
        let r = radius as i64;
        Self::build(Shape::Box(boundary), vec![-r; dim], vec![r; dim])
    }

    pub fn boxed(lo: Vec<i64>, hi: Vec<i64>, boundary: Boundary) -> Result<Self> {
        Self::build(Shape::Box(boundary), lo, hi)
    }

    /// `(Z / side Z)^dim`, coordinates `0..side`.
    pub fn torus(dim: usize, side: u32) -> Result<Self> {
        if side == 0 {
            return Err(Error::InvalidSpec("torus side must be positive".into()));
        }
        Self::build(Shape::Torus, vec![0; dim], vec![side as i64 - 1; dim])
    }

    pub fn window(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        Self::build(Shape::Window, lo, hi)
    }

    pub fn window_cube(dim: usize, radius: u32) -> Result<Self> {
        let r = radius as i64;
        Self::window(vec![-r; dim], vec![r; dim])
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Number of stored sites (including a window's parking shell).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn lower(&self) -> &[i64] {
        &self.lo
    }

    pub fn upper(&self) -> &[i64] {
        &self.hi
    }

    pub fn interior_len(&self) -> usize {
        self.lo.iter().zip(&self.hi).map(|(a, b)| (b - a + 1) as usize).product()
    }

    pub fn conserves_mass(&self) -> bool {
        !matches!(self.shape, Shape::Box(Boundary::Kill))
    }

    #[inline]
    pub fn coord(&self, idx: usize, axis: usize) -> i64 {
        ((idx / self.stride[axis]) % self.extent[axis]) as i64 + self.store_lo[axis]
    }

    pub fn coords(&self, idx: usize) -> Vec<i64> {
        (0..self.dim()).map(|a| self.coord(idx, a)).collect()
    }

    /// Storage index of a site, shell included.
    pub fn index_of(&self, coords: &[i64]) -> Option<usize> {
        if coords.len() != self.dim() {
            return None;
        }
        let mut idx = 0;
        for (a, &c) in coords.iter().enumerate() {
            let off = c - self.store_lo[a];
            if off < 0 || off as usize >= self.extent[a] {
                return None;
            }
            idx += off as usize * self.stride[a];
        }
        Some(idx)
    }

    /// Interior sites are those that may be toppled and that initial laws populate.
    pub fn is_interior(&self, idx: usize) -> bool {
        if idx >= self.len {
            return false;
        }
        if self.shape != Shape::Window {
            return true;
        }
        (0..self.dim()).all(|a| {
            let c = self.coord(idx, a);
            c >= self.lo[a] && c <= self.hi[a]
        })
    }

    pub fn interior(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.is_interior(i))
    }

    pub fn origin(&self) -> Option<usize> {
        let zero = vec![0; self.dim()];
        self.index_of(&zero).filter(|&i| self.is_interior(i))
    }

    #[inline]
    pub fn step(&self, idx: usize, dir: Direction) -> Step {
        let a = dir.axis();
        let s = self.stride[a];
        let e = self.extent[a];
        let c = (idx / s) % e;
        if dir.positive() {
            if c + 1 < e {
                Step::Site(idx + s)
            } else {
                self.wrap_or_exit(idx, idx + s - e * s)
            }
        } else if c > 0 {
            Step::Site(idx - s)
        } else {
            self.wrap_or_exit(idx, idx + (e - 1) * s)
        }
    }

    #[inline]
    fn wrap_or_exit(&self, from: usize, wrapped: usize) -> Step {
        match self.shape {
            Shape::Torus => Step::Site(wrapped),
            Shape::Box(Boundary::Closed) => Step::Site(from),
            Shape::Box(Boundary::Kill) | Shape::Window => Step::Outside,
        }
    }

    /// Text form used in snapshot headers, e.g. `box:kill:-5..5,-5..5`,
    /// `torus:128x128`, `window:-8..8`.
    pub fn describe(&self) -> String {
        let ranges = || {
            self.lo
                .iter()
                .zip(&self.hi)
                .map(|(a, b)| format!("{a}..{b}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        match self.shape {
            Shape::Box(Boundary::Kill) => format!("box:kill:{}", ranges()),
            Shape::Box(Boundary::Closed) => format!("box:closed:{}", ranges()),
            Shape::Window => format!("window:{}", ranges()),
            Shape::Torus => format!(
                "torus:{}",
                self.hi.iter().map(|h| (h + 1).to_string()).collect::<Vec<_>>().join("x")
            ),
        }
    }

    pub fn parse_describe(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unrecognised shape '{s}'"));
        let ranges = |txt: &str| -> Result<(Vec<i64>, Vec<i64>)> {
            let mut lo = Vec::new();
            let mut hi = Vec::new();
            for part in txt.split(',') {
                let (a, b) = part.split_once("..").ok_or_else(bad)?;
                lo.push(a.trim().parse().map_err(|_| bad())?);
                hi.push(b.trim().parse().map_err(|_| bad())?);
            }
            Ok((lo, hi))
        };
        if let Some(rest) = s.strip_prefix("box:kill:") {
            let (lo, hi) = ranges(rest)?;
            Self::boxed(lo, hi, Boundary::Kill)
        } else if let Some(rest) = s.strip_prefix("box:closed:") {
            let (lo, hi) = ranges(rest)?;
            Self::boxed(lo, hi, Boundary::Closed)
        } else if let Some(rest) = s.strip_prefix("window:") {
            let (lo, hi) = ranges(rest)?;
            Self::window(lo, hi)
        } else if let Some(rest) = s.strip_prefix("torus:") {
            let sides: Vec<i64> = rest
                .split('x')
                .map(|t| t.trim().parse::<i64>().map_err(|_| bad()))
                .collect::<Result<_>>()?;
            if sides.iter().any(|&n| n <= 0) {
                return Err(bad());
            }
            Self::build(Shape::Torus, vec![0; sides.len()], sides.iter().map(|n| n - 1).collect())
        } else {
            Err(bad())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_has_n_to_the_d_sites_and_wraps() {
        let t = Lattice::torus(2, 5).unwrap();
        assert_eq!(t.len(), 25);
        let corner = t.index_of(&[4, 4]).unwrap();
        let wrapped = match t.step(corner, Direction::new(1, true)) {
            Step::Site(i) => i,
            Step::Outside => panic!(),
        };
        assert_eq!(t.coords(wrapped), vec![4, 0]);
        let back = match t.step(t.index_of(&[0, 3]).unwrap(), Direction::new(0, false)) {
            Step::Site(i) => i,
            Step::Outside => panic!(),
        };
        assert_eq!(t.coords(back), vec![4, 3]);
    }

    #[test]
    fn kill_box_exits_and_closed_box_stays() {
        let k = Lattice::cube(1, 2, Boundary::Kill).unwrap();
        let edge = k.index_of(&[2]).unwrap();
        assert_eq!(k.step(edge, Direction::new(0, true)), Step::Outside);
        let c = Lattice::cube(1, 2, Boundary::Closed).unwrap();
        let edge = c.index_of(&[-2]).unwrap();
        assert_eq!(c.step(edge, Direction::new(0, false)), Step::Site(edge));
    }

    #[test]
    fn window_parks_on_shell() {
        let w = Lattice::window_cube(2, 1).unwrap();
        assert_eq!(w.len(), 25);
        assert_eq!(w.interior_len(), 9);
        assert_eq!(w.interior().count(), 9);
        let edge = w.index_of(&[1, 0]).unwrap();
        let Step::Site(t) = w.step(edge, Direction::new(0, true)) else { panic!() };
        assert_eq!(w.coords(t), vec![2, 0]);
        assert!(!w.is_interior(t));
        assert!(w.origin().is_some());
    }

    #[test]
    fn describe_roundtrip() {
        for l in [
            Lattice::cube(2, 3, Boundary::Kill).unwrap(),
            Lattice::boxed(vec![1], vec![9], Boundary::Closed).unwrap(),
            Lattice::torus(1, 128).unwrap(),
            Lattice::window_cube(3, 2).unwrap(),
        ] {
            assert_eq!(Lattice::parse_describe(&l.describe()).unwrap(), l);
        }
    }

    #[test]
    fn coords_and_index_agree() {
        let l = Lattice::boxed(vec![-2, 3], vec![1, 7], Boundary::Kill).unwrap();
        for i in 0..l.len() {
            assert_eq!(l.index_of(&l.coords(i)), Some(i));
        }
    }
}
