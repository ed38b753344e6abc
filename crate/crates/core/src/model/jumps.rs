use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::lattice::Direction;

/// Nearest-neighbour jump kernel `p(±e_a)`.
///
/// Weights are stored in direction order `+e1, -e1, +e2, -e2, ...` together
/// with a 64-bit cumulative table used by the instruction field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct JumpDistribution {
    weights: Vec<f64>,
    cumulative: Vec<u64>,
    last: usize,
}

impl JumpDistribution {
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.len() % 2 != 0 {
            return Err(Error::InvalidSpec("need one weight per direction (2d entries)".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidSpec("jump weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidSpec(format!("jump weights sum to {total}, not 1")));
        }
        let dim = weights.len() / 2;
        for a in 0..dim {
            if weights[2 * a] == 0.0 && weights[2 * a + 1] == 0.0 {
                return Err(Error::InvalidSpec(format!(
                    "axis {} has no jump weight; support must reach every coordinate",
                    a + 1
                )));
            }
        }
        let last = weights.iter().rposition(|&w| w > 0.0).expect("positive weight");
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for w in &weights {
            acc += w;
            cumulative.push(to_threshold(acc / total));
        }
        Ok(JumpDistribution { weights, cumulative, last })
    }

    pub fn symmetric(dim: usize) -> Self {
        Self::from_weights(vec![1.0 / (2 * dim) as f64; 2 * dim]).expect("symmetric kernel")
    }

    /// Every jump goes to `+e1`. Only meaningful in one dimension.
    pub fn directed_1d() -> Self {
        Self::from_weights(vec![1.0, 0.0]).expect("directed kernel")
    }

    /// Biased walk: `p(+e1) = forward`, remaining mass spread uniformly over
    /// the other `2d - 1` directions.
    pub fn biased(dim: usize, forward: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&forward) {
            return Err(Error::InvalidSpec("forward weight must lie in [0, 1]".into()));
        }
        let rest = if dim * 2 > 1 { (1.0 - forward) / (2 * dim - 1) as f64 } else { 0.0 };
        let mut w = vec![rest; 2 * dim];
        w[0] = forward;
        Self::from_weights(w)
    }

    pub fn dim(&self) -> usize {
        self.weights.len() / 2
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, dir: Direction) -> f64 {
        self.weights[dir.0 as usize]
    }

    pub fn support(&self) -> impl Iterator<Item = Direction> + '_ {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > 0.0)
            .map(|(i, _)| Direction(i as u8))
    }

    /// Mean displacement `sum_y y p(y)`.
    pub fn drift(&self) -> Vec<f64> {
        (0..self.dim()).map(|a| self.weights[2 * a] - self.weights[2 * a + 1]).collect()
    }

    pub fn drift_along(&self, v: &[f64]) -> f64 {
        self.drift().iter().zip(v).map(|(a, b)| a * b).sum()
    }

    pub fn is_directed(&self) -> bool {
        self.dim() == 1 && self.weights[1] == 0.0
    }

    /// Maps a uniform 64-bit word to a direction by inverting the cumulative table.
    #[inline]
    pub fn sample(&self, u: u64) -> Direction {
        let mut i = 0;
        while i < self.last && u >= self.cumulative[i] {
            i += 1;
        }
        Direction(i as u8)
    }

    pub fn sample_unit(&self, u: f64) -> Direction {
        let mut acc = 0.0;
        let mut last = 0;
        for (i, &w) in self.weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            last = i;
            acc += w;
            if u < acc {
                return Direction(i as u8);
            }
        }
        Direction(last as u8)
    }
}

fn to_threshold(p: f64) -> u64 {
    if p >= 1.0 {
        u64::MAX
    } else {
        (p * 18_446_744_073_709_551_616.0) as u64
    }
}

impl TryFrom<Vec<f64>> for JumpDistribution {
    type Error = Error;
    fn try_from(w: Vec<f64>) -> Result<Self> {
        Self::from_weights(w)
    }
}

impl From<JumpDistribution> for Vec<f64> {
    fn from(j: JumpDistribution) -> Self {
        j.weights
    }
}

/// Sleep rate: finite positive or infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SleepRate {
    Finite(f64),
    Infinite,
}

impl SleepRate {
    pub fn finite(lambda: f64) -> Result<Self> {
        if lambda.is_finite() && lambda > 0.0 {
            Ok(SleepRate::Finite(lambda))
        } else {
            Err(Error::InvalidSpec(format!("sleep rate must be positive, got {lambda}")))
        }
    }

    /// Accepts decimal strings and `inf`/`infinity`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "inf" || t == "infinity" {
            return Ok(SleepRate::Infinite);
        }
        let v: f64 = t.parse().map_err(|_| Error::Parse(format!("bad sleep rate '{s}'")))?;
        if v.is_infinite() && v > 0.0 {
            Ok(SleepRate::Infinite)
        } else {
            Self::finite(v)
        }
    }

    /// `q = lambda / (1 + lambda)`; `1` for infinite rate.
    pub fn sleep_prob(self) -> f64 {
        match self {
            SleepRate::Finite(l) => l / (1.0 + l),
            SleepRate::Infinite => 1.0,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            SleepRate::Finite(l) => l,
            SleepRate::Infinite => f64::INFINITY,
        }
    }

    pub fn label(self) -> String {
        match self {
            SleepRate::Finite(l) => format!("{l}"),
            SleepRate::Infinite => "inf".into(),
        }
    }
}

impl Serialize for SleepRate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for SleepRate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        SleepRate::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Sleep rate plus jump kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub lambda: SleepRate,
    pub jumps: JumpDistribution,
}

impl ModelParams {
    pub fn new(lambda: SleepRate, jumps: JumpDistribution) -> Self {
        ModelParams { lambda, jumps }
    }

    pub fn dim(&self) -> usize {
        self.jumps.dim()
    }

    pub fn sleep_prob(&self) -> f64 {
        self.lambda.sleep_prob()
    }
}
