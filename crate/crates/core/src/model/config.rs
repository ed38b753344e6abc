use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::lattice::Lattice;
use crate::model::state::{code, SiteState};

/// Dense configuration over a lattice with a running particle total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    lattice: Lattice,
    pub(crate) cells: Vec<i32>,
    pub(crate) total: u64,
}

impl Configuration {
    pub fn empty(lattice: Lattice) -> Self {
        let n = lattice.len();
        Configuration { lattice, cells: vec![code::EMPTY; n], total: 0 }
    }

    /// All interior sites set to `Active(n)` (or empty when `n == 0`).
    pub fn constant(lattice: Lattice, n: u32) -> Self {
        let mut c = Self::empty(lattice);
        let sites: Vec<usize> = c.lattice.interior().collect();
        for i in sites {
            c.add_active(i, n);
        }
        c
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn codes(&self) -> &[i32] {
        &self.cells
    }

    pub fn get(&self, idx: usize) -> SiteState {
        SiteState::from_code(self.cells[idx])
    }

    pub fn get_at(&self, coords: &[i64]) -> Option<SiteState> {
        self.lattice.index_of(coords).map(|i| self.get(i))
    }

    pub fn count(&self, idx: usize) -> u32 {
        code::count(self.cells[idx])
    }

    pub fn set(&mut self, idx: usize, s: SiteState) {
        self.total -= u64::from(code::count(self.cells[idx]));
        self.cells[idx] = s.to_code();
        self.total += u64::from(s.particle_count());
    }

    pub fn set_at(&mut self, coords: &[i64], s: SiteState) -> Result<()> {
        let idx = self
            .lattice
            .index_of(coords)
            .ok_or_else(|| Error::InvalidSpec(format!("site {coords:?} outside {}", self.lattice.describe())))?;
        self.set(idx, s);
        Ok(())
    }

    /// Adds `n` active particles (waking a sleeper if present).
    pub fn add_active(&mut self, idx: usize, n: u32) {
        for _ in 0..n {
            self.cells[idx] = code::add(self.cells[idx]);
        }
        self.total += u64::from(n);
    }

    pub fn total_particles(&self) -> u64 {
        self.total
    }

    /// Recount from the cells, for checking the running total.
    pub fn recount(&self) -> u64 {
        self.cells.iter().map(|&c| u64::from(code::count(c))).sum()
    }

    pub fn particles_in(&self, vol: &Volume) -> u64 {
        vol.sites().iter().map(|&i| u64::from(self.count(i))).sum()
    }

    pub fn sleepers_in(&self, vol: &Volume) -> u64 {
        vol.sites().iter().filter(|&&i| self.cells[i] == code::SLEEPING).count() as u64
    }

    pub fn active_sites(&self) -> impl Iterator<Item = usize> + '_ {
        self.cells.iter().enumerate().filter(|(_, &c)| c > 0).map(|(i, _)| i)
    }

    /// Pointwise order `self <= other` in the site order.
    pub fn le(&self, other: &Configuration) -> bool {
        self.cells.len() == other.cells.len()
            && self.cells.iter().zip(&other.cells).all(|(&a, &b)| code::rank(a) <= code::rank(b))
    }

    /// True when every site is empty or holds one sleeping particle.
    pub fn is_absorbing(&self) -> bool {
        self.cells.iter().all(|&c| c <= 0)
    }

    /// Copy onto another lattice, site by site through coordinates. Sites the
    /// target does not contain are dropped.
    pub fn transplant(&self, target: &Lattice) -> Configuration {
        let mut out = Configuration::empty(target.clone());
        for i in 0..self.cells.len() {
            if self.cells[i] != code::EMPTY {
                if let Some(j) = target.index_of(&self.lattice.coords(i)) {
                    out.set(j, self.get(i));
                }
            }
        }
        out
    }

    pub fn header(&self) -> String {
        format!("arw-snapshot d={} shape={}", self.lattice.dim(), self.lattice.describe())
    }

    /// Text snapshot: header, then one `x0 .. v` line per occupied site.
    pub fn to_snapshot(&self) -> String {
        let mut s = self.header();
        s.push('\n');
        for (i, &c) in self.cells.iter().enumerate() {
            if c == code::EMPTY {
                continue;
            }
            for x in self.lattice.coords(i) {
                let _ = write!(s, "{x} ");
            }
            let _ = writeln!(s, "{c}");
        }
        s
    }

    pub fn from_snapshot(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let head = lines.next().ok_or_else(|| Error::Parse("empty snapshot".into()))?;
        let lattice = parse_header(head)?;
        let d = lattice.dim();
        let mut cfg = Configuration::empty(lattice);
        for line in lines {
            let nums: Vec<i64> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad snapshot line '{line}'"))))
                .collect::<Result<_>>()?;
            if nums.len() != d + 1 {
                return Err(Error::Parse(format!("expected {} fields in '{line}'", d + 1)));
            }
            let state = SiteState::try_from_code(nums[d] as i32)?;
            let idx = cfg
                .lattice
                .index_of(&nums[..d])
                .ok_or_else(|| Error::Parse(format!("site outside shape in '{line}'")))?;
            cfg.set(idx, state);
        }
        Ok(cfg)
    }
}

pub(crate) fn parse_header(head: &str) -> Result<Lattice> {
    let rest = head
        .strip_prefix("arw-snapshot ")
        .ok_or_else(|| Error::Parse("missing 'arw-snapshot' header".into()))?;
    let mut dim = None;
    let mut shape = None;
    for tok in rest.split_whitespace() {
        if let Some(v) = tok.strip_prefix("d=") {
            dim = Some(v.parse::<usize>().map_err(|_| Error::Parse(format!("bad dimension '{v}'")))?);
        } else if let Some(v) = tok.strip_prefix("shape=") {
            shape = Some(Lattice::parse_describe(v)?);
        }
    }
    let lattice = shape.ok_or_else(|| Error::Parse("header lacks shape=".into()))?;
    if dim != Some(lattice.dim()) {
        return Err(Error::Parse("header dimension disagrees with shape".into()));
    }
    Ok(lattice)
}

/// A set of interior sites of a lattice, in increasing storage order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Volume {
    mask: Vec<bool>,
    sites: Vec<usize>,
}

impl Volume {
    pub fn from_indices(lattice: &Lattice, mut idx: Vec<usize>) -> Result<Self> {
        idx.sort_unstable();
        idx.dedup();
        let mut mask = vec![false; lattice.len()];
        for &i in &idx {
            if !lattice.is_interior(i) {
                return Err(Error::InvalidVolume(format!("index {i} is not an interior site")));
            }
            mask[i] = true;
        }
        Ok(Volume { mask, sites: idx })
    }

    pub fn from_coords(lattice: &Lattice, coords: &[Vec<i64>]) -> Result<Self> {
        let idx = coords
            .iter()
            .map(|c| {
                lattice
                    .index_of(c)
                    .filter(|&i| lattice.is_interior(i))
                    .ok_or_else(|| Error::InvalidVolume(format!("site {c:?} outside {}", lattice.describe())))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_indices(lattice, idx)
    }

    pub fn whole(lattice: &Lattice) -> Self {
        Self::from_indices(lattice, lattice.interior().collect()).expect("interior sites")
    }

    /// Sites with every coordinate in `-radius..=radius`.
    pub fn cube(lattice: &Lattice, radius: i64) -> Result<Self> {
        let idx: Vec<usize> = lattice
            .interior()
            .filter(|&i| (0..lattice.dim()).all(|a| lattice.coord(i, a).abs() <= radius))
            .collect();
        let side = (2 * radius + 1) as usize;
        if idx.len() != side.pow(lattice.dim() as u32) {
            return Err(Error::InvalidVolume(format!(
                "cube of radius {radius} not contained in {}",
                lattice.describe()
            )));
        }
        Self::from_indices(lattice, idx)
    }

    pub fn filter(lattice: &Lattice, keep: impl Fn(&[i64]) -> bool) -> Self {
        let idx = lattice.interior().filter(|&i| keep(&lattice.coords(i))).collect();
        Self::from_indices(lattice, idx).expect("interior sites")
    }

    #[inline(always)]
    pub fn contains(&self, idx: usize) -> bool {
        self.mask.get(idx).copied().unwrap_or(false)
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn domain_len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_subset(&self, other: &Volume) -> bool {
        self.sites.iter().all(|&i| other.contains(i))
    }
}
