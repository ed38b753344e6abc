use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::config::Configuration;
use crate::model::lattice::Lattice;
use crate::rng::site_key;

/// Law of the initial configuration. Every sampled particle starts active.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum InitialState {
    IidPoisson(f64),
    IidBernoulli(f64),
    /// `floor(zeta)` particles plus one more with probability `frac(zeta)`.
    IidBernoulliMixture(f64),
    Deterministic(u32),
    Explicit(Vec<(Vec<i64>, u32)>),
}

impl InitialState {
    pub fn poisson(zeta: f64) -> Result<Self> {
        check_density(zeta)?;
        Ok(InitialState::IidPoisson(zeta))
    }

    pub fn bernoulli(zeta: f64) -> Result<Self> {
        check_density(zeta)?;
        if zeta > 1.0 {
            return Err(Error::InvalidSpec(format!("Bernoulli density {zeta} exceeds 1")));
        }
        Ok(InitialState::IidBernoulli(zeta))
    }

    pub fn mixture(zeta: f64) -> Result<Self> {
        check_density(zeta)?;
        Ok(InitialState::IidBernoulliMixture(zeta))
    }

    /// Integer-valued only; a fractional density is rejected rather than rounded.
    pub fn deterministic(zeta: f64) -> Result<Self> {
        check_density(zeta)?;
        if zeta.fract() != 0.0 || zeta > u32::MAX as f64 {
            return Err(Error::InvalidSpec(format!("deterministic density must be an integer, got {zeta}")));
        }
        Ok(InitialState::Deterministic(zeta as u32))
    }

    /// Same law family at another density.
    pub fn with_density(&self, zeta: f64) -> Result<Self> {
        match self {
            InitialState::IidPoisson(_) => Self::poisson(zeta),
            InitialState::IidBernoulli(_) => Self::bernoulli(zeta),
            InitialState::IidBernoulliMixture(_) => Self::mixture(zeta),
            InitialState::Deterministic(_) => Self::deterministic(zeta),
            InitialState::Explicit(_) => Err(Error::InvalidSpec("explicit configurations have no density parameter".into())),
        }
    }

    /// Expected particles per site; `None` for explicit lists.
    pub fn density(&self) -> Option<f64> {
        match *self {
            InitialState::IidPoisson(z) | InitialState::IidBernoulli(z) | InitialState::IidBernoulliMixture(z) => Some(z),
            InitialState::Deterministic(n) => Some(n as f64),
            InitialState::Explicit(_) => None,
        }
    }

    pub fn is_iid(&self) -> bool {
        !matches!(self, InitialState::Explicit(_))
    }

    pub fn label(&self) -> String {
        match self {
            InitialState::IidPoisson(_) => "poisson".into(),
            InitialState::IidBernoulli(_) => "bernoulli".into(),
            InitialState::IidBernoulliMixture(_) => "mixture".into(),
            InitialState::Deterministic(_) => "deterministic".into(),
            InitialState::Explicit(_) => "explicit".into(),
        }
    }

    /// Parses `poisson`, `bernoulli`, `mixture`, `deterministic` at density `zeta`.
    pub fn parse_kind(kind: &str, zeta: f64) -> Result<Self> {
        match kind.trim().to_ascii_lowercase().as_str() {
            "poisson" => Self::poisson(zeta),
            "bernoulli" => Self::bernoulli(zeta),
            "mixture" | "bernoulli-mixture" => Self::mixture(zeta),
            "deterministic" | "constant" => Self::deterministic(zeta),
            other => Err(Error::Parse(format!("unknown initial law '{other}'"))),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            InitialState::IidPoisson(z) | InitialState::IidBernoulliMixture(z) => check_density(*z),
            InitialState::IidBernoulli(z) => Self::bernoulli(*z).map(|_| ()),
            _ => Ok(()),
        }
    }
}

fn check_density(zeta: f64) -> Result<()> {
    if zeta.is_finite() && zeta >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("density must be finite and nonnegative, got {zeta}")))
    }
}

/// Draws a configuration on the interior of `lattice`.
///
/// Each site uses its own stream keyed by `(seed, coordinates)`, so nested
/// domains sampled with one seed agree on their common sites.
pub fn sample_initial(spec: &InitialState, lattice: &Lattice, seed: u64) -> Result<Configuration> {
    spec.validate()?;
    let mut cfg = Configuration::empty(lattice.clone());
    let interior: Vec<usize> = lattice.interior().collect();
    let draw = |idx: usize, f: &mut dyn FnMut(&mut ChaCha8Rng) -> u32| {
        let mut rng = ChaCha8Rng::seed_from_u64(site_key(seed, &lattice.coords(idx)));
        f(&mut rng)
    };
    match spec {
        InitialState::IidPoisson(z) => {
            if *z > 0.0 {
                let law = Poisson::new(*z).map_err(|e| Error::InvalidSpec(e.to_string()))?;
                for i in interior {
                    let n = draw(i, &mut |r| law.sample(r) as u32);
                    cfg.add_active(i, n);
                }
            }
        }
        InitialState::IidBernoulli(z) => {
            let law = Bernoulli::new(*z).map_err(|e| Error::InvalidSpec(e.to_string()))?;
            for i in interior {
                let n = draw(i, &mut |r| u32::from(law.sample(r)));
                cfg.add_active(i, n);
            }
        }
        InitialState::IidBernoulliMixture(z) => {
            let base = z.floor() as u32;
            let law = Bernoulli::new(z.fract()).map_err(|e| Error::InvalidSpec(e.to_string()))?;
            for i in interior {
                let n = base + draw(i, &mut |r| u32::from(law.sample(r)));
                cfg.add_active(i, n);
            }
        }
        InitialState::Deterministic(n) => {
            for i in interior {
                cfg.add_active(i, *n);
            }
        }
        InitialState::Explicit(list) => {
            for (x, n) in list {
                let i = lattice
                    .index_of(x)
                    .filter(|&i| lattice.is_interior(i))
                    .ok_or_else(|| Error::InvalidSpec(format!("explicit site {x:?} outside {}", lattice.describe())))?;
                cfg.add_active(i, *n);
            }
        }
    }
    Ok(cfg)
}
