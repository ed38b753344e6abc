use serde::{Deserialize, Serialize};

use crate::engine::DEFAULT_BUDGET;
use crate::error::{Error, Result};
use crate::model::{InitialState, JumpDistribution, ModelParams, SleepRate};
use crate::rng::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    ConditionB,
    ConditionU,
    ConditionE,
    PhaseScan,
    RingFixedEnergy,
    DrivenDissipative,
    UniversalityCheck,
    FewStayProbe,
}

impl ExperimentKind {
    pub fn label(self) -> &'static str {
        match self {
            ExperimentKind::ConditionB => "condition_b",
            ExperimentKind::ConditionU => "condition_u",
            ExperimentKind::ConditionE => "condition_e",
            ExperimentKind::PhaseScan => "phase_scan",
            ExperimentKind::RingFixedEnergy => "ring",
            ExperimentKind::DrivenDissipative => "driven_dissipative",
            ExperimentKind::UniversalityCheck => "universality",
            ExperimentKind::FewStayProbe => "few_stay",
        }
    }
}

/// Declarative description of a Monte Carlo experiment.
///
/// `sizes` are box radii for the condition drivers, ring lengths for the
/// fixed-energy driver, box sides for the driven-dissipative chain and `r`
/// for the few-stay probe. `k_grid` holds odometer thresholds, the constant
/// `kappa` of the ring driver, or the mass fractions `rho` of the few-stay
/// probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub dim: usize,
    pub jumps: JumpDistribution,
    pub lambda: SleepRate,
    pub initial: InitialState,
    /// Further initial laws compared by the universality driver.
    pub alternatives: Vec<InitialState>,
    pub sizes: Vec<u32>,
    pub k_grid: Vec<f64>,
    /// Densities visited by the phase scan.
    pub zetas: Vec<f64>,
    pub replicas: u64,
    /// Topplings allowed to one stabilization.
    pub budget: u64,
    /// Particles added per driven-dissipative chain.
    pub steps: u64,
    pub master_seed: u64,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind, jumps: JumpDistribution, lambda: SleepRate, initial: InitialState) -> Self {
        ExperimentSpec {
            kind,
            dim: jumps.dim(),
            jumps,
            lambda,
            initial,
            alternatives: Vec::new(),
            sizes: Vec::new(),
            k_grid: Vec::new(),
            zetas: Vec::new(),
            replicas: 100,
            budget: DEFAULT_BUDGET,
            steps: 10_000,
            master_seed: 0,
        }
    }

    pub fn params(&self) -> ModelParams {
        ModelParams::new(self.lambda, self.jumps.clone())
    }

    /// Seed of replica `r`; depends on nothing else.
    pub fn replica_seed(&self, r: u64) -> u64 {
        derive_seed(self.master_seed, &[r])
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim != self.jumps.dim() {
            return Err(Error::InvalidSpec(format!("dim {} but jump kernel in dimension {}", self.dim, self.jumps.dim())));
        }
        if self.sizes.is_empty() {
            return Err(Error::InvalidSpec("at least one size is required".into()));
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSpec("sizes must be strictly increasing".into()));
        }
        if let SleepRate::Finite(l) = self.lambda {
            if !(l.is_finite() && l >= 0.0) {
                return Err(Error::InvalidSpec(format!("sleep rate must be nonnegative, got {l}")));
            }
        }
        if self.initial.density().is_some_and(|z| !(z >= 0.0 && z.is_finite())) {
            return Err(Error::InvalidSpec("density must be finite and nonnegative".into()));
        }
        match self.kind {
            ExperimentKind::RingFixedEnergy | ExperimentKind::FewStayProbe if self.dim != 1 => {
                Err(Error::WrongModel(format!("{} runs in one dimension", self.kind.label())))
            }
            ExperimentKind::PhaseScan if self.zetas.is_empty() => Err(Error::InvalidSpec("phase scan needs densities".into())),
            ExperimentKind::ConditionE | ExperimentKind::UniversalityCheck | ExperimentKind::PhaseScan
                if !self.initial.is_iid() =>
            {
                Err(Error::InvalidSpec("exit-flux drivers need an i.i.d. initial law".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_roundtrip() {
        let mut s = ExperimentSpec::new(
            ExperimentKind::ConditionE,
            JumpDistribution::directed_1d(),
            SleepRate::Infinite,
            InitialState::poisson(0.6).unwrap(),
        );
        s.sizes = vec![50, 100];
        s.alternatives = vec![InitialState::mixture(0.6).unwrap()];
        let back = ExperimentSpec::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn sizes_must_increase() {
        let mut s = ExperimentSpec::new(
            ExperimentKind::ConditionB,
            JumpDistribution::symmetric(1),
            SleepRate::Finite(1.0),
            InitialState::poisson(0.4).unwrap(),
        );
        s.sizes = vec![10, 10];
        assert!(s.validate().is_err());
        s.sizes = vec![10, 20];
        s.validate().unwrap();
    }

    #[test]
    fn replica_seeds_depend_on_index_only() {
        let s = ExperimentSpec::new(
            ExperimentKind::ConditionB,
            JumpDistribution::symmetric(1),
            SleepRate::Finite(1.0),
            InitialState::poisson(0.4).unwrap(),
        );
        let mut t = s.clone();
        t.sizes = vec![3, 4];
        assert_eq!(s.replica_seed(5), t.replica_seed(5));
        assert_ne!(s.replica_seed(5), s.replica_seed(6));
    }
}
