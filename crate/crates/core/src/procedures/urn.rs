//! Two-colour urn: each turn a ball is drawn with probability proportional to
//! the colour counts and a geometric number of balls of the other colour is
//! destroyed.

use rand::Rng;
use rand_distr::{Distribution, Geometric};

use crate::error::{Error, Result};
use crate::rng::stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UrnRun {
    /// First turn after which one colour is exhausted.
    pub k_star: u64,
    /// Sum of the drawn destruction sizes, before clipping at the colour count.
    pub drawn: u64,
    /// Purple and yellow counts at the end (one of them is `<= 0`).
    pub x: i64,
    pub z: i64,
}

/// Runs the urn from `X = Z = r`. Destruction sizes are geometric on
/// `{1, 2, ...}` with success probability `zeta2`, so mean `1 / zeta2`.
pub fn urn_run(r: u64, zeta2: f64, seed: u64) -> Result<UrnRun> {
    if r == 0 || !(zeta2 > 0.0 && zeta2 < 1.0) {
        return Err(Error::InvalidSpec("urn needs r >= 1 and 0 < zeta'' < 1".into()));
    }
    let geo = Geometric::new(zeta2).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    let mut rng = stream(seed);
    let (mut x, mut z) = (r as i64, r as i64);
    let mut k = 0;
    let mut drawn = 0;
    while x > 0 && z > 0 {
        k += 1;
        let y = geo.sample(&mut rng) + 1;
        drawn += y;
        if rng.random::<f64>() * ((x + z) as f64) < x as f64 {
            z -= y as i64;
        } else {
            x -= y as i64;
        }
    }
    Ok(UrnRun { k_star: k, drawn, x, z })
}
