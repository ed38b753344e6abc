//! Randomized checks of the exact invariants: Abelianness, the odometer
//! sandwich, strong minus weak, monotonicity, conservation and agreement of
//! the continuous-time run with the engine.

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{ct_run, RunStatus};
use crate::engine::{Engine, Fault, Odometer, Status, Strategy, ToppleMode};
use crate::error::Result;
use crate::field::InstructionField;
use crate::model::{Boundary, Configuration, JumpDistribution, Lattice, ModelParams, SiteState, SleepRate, Volume};
use crate::rng::{derive_seed, stream};

/// Topplings allowed per stabilization inside the checks.
pub const CHECK_BUDGET: u64 = 200_000;

/// A small random instance: configuration, volume and field.
#[derive(Debug, Clone)]
pub struct Instance {
    pub seed: u64,
    pub cfg: Configuration,
    pub volume: Volume,
    pub field: InstructionField,
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.field.params();
        writeln!(f, "instance seed {}", self.seed)?;
        writeln!(f, "field seed {} lambda {} jumps {:?}", self.field.seed(), p.lambda.label(), p.jumps.weights())?;
        let sites: Vec<Vec<i64>> = self.volume.sites().iter().map(|&i| self.cfg.lattice().coords(i)).collect();
        writeln!(f, "volume {sites:?}")?;
        write!(f, "{}", self.cfg.to_snapshot())
    }
}

const LAMBDAS: [f64; 3] = [0.2, 1.0, 5.0];

/// Draws an instance with at most 25 sites and 30 particles, in `d = 1` or
/// `d = 2`, on a kill box, a closed box or a torus. Domains that conserve
/// mass get at most a third as many particles as sites so that they fixate
/// quickly.
pub fn random_instance(seed: u64) -> Instance {
    let mut rng = stream(derive_seed(seed, &[0x1A57]));
    let d = rng.random_range(1..=2usize);
    let lattice = match (d, rng.random_range(0..3)) {
        (1, 0) => Lattice::torus(1, rng.random_range(2..=25)),
        (1, b) => {
            let r = rng.random_range(0..=12);
            Lattice::cube(1, r, if b == 1 { Boundary::Kill } else { Boundary::Closed })
        }
        (_, 0) => Lattice::torus(2, rng.random_range(2..=5)),
        (_, b) => {
            let r = rng.random_range(0..=2);
            Lattice::cube(2, r, if b == 1 { Boundary::Kill } else { Boundary::Closed })
        }
    }
    .expect("valid lattice");
    let jumps = match rng.random_range(0..3) {
        0 => JumpDistribution::symmetric(d),
        1 if d == 1 => JumpDistribution::directed_1d(),
        _ => JumpDistribution::biased(d, rng.random_range(0.3..0.7)).expect("valid kernel"),
    };
    let lambda = LAMBDAS[rng.random_range(0..3)];
    let field = InstructionField::new(rng.random(), ModelParams::new(SleepRate::Finite(lambda), jumps));
    let sites: Vec<usize> = lattice.interior().collect();
    let cap = if lattice.conserves_mass() { sites.len() / 3 } else { 30 };
    let n = rng.random_range(0..=cap.min(30));
    let mut cfg = Configuration::empty(lattice.clone());
    for _ in 0..n {
        cfg.add_active(sites[rng.random_range(0..sites.len())], 1);
    }
    let volume = random_volume(&mut rng, &lattice);
    Instance { seed, cfg, volume, field }
}

/// Whole domain half of the time, otherwise a random subset containing the origin.
fn random_volume(rng: &mut ChaCha8Rng, lattice: &Lattice) -> Volume {
    if rng.random_bool(0.5) {
        return Volume::whole(lattice);
    }
    let origin = lattice.origin();
    let keep: Vec<usize> = lattice.interior().filter(|&i| Some(i) == origin || rng.random_bool(0.7)).collect();
    Volume::from_indices(lattice, keep).expect("interior sites")
}

/// Outcome of one check on one instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
    /// A stabilization ran out of budget or the check does not apply.
    Skipped,
}

impl Verdict {
    fn from(ok: bool) -> Self {
        if ok {
            Verdict::Holds
        } else {
            Verdict::Violated
        }
    }
}

/// Engine factory so that the checks can run against a faulty engine.
#[derive(Debug, Clone, Copy, Default)]
pub struct Checker {
    pub fault: Option<Fault>,
}

struct Run {
    config: Configuration,
    odometer: Odometer,
    exits: u64,
}

impl Checker {
    fn run(&self, cfg: &Configuration, vol: &Volume, field: &InstructionField, strategy: Strategy, mode: ToppleMode) -> Result<Option<Run>> {
        let mut e = Engine::new(cfg.clone(), field.clone())?;
        if let Some(f) = self.fault {
            e.inject_fault(f);
        }
        if e.stabilize(vol, strategy, mode, CHECK_BUDGET)? == Status::BudgetExceeded {
            return Ok(None);
        }
        let exits = e.exits();
        let (config, odometer) = e.into_parts();
        Ok(Some(Run { config, odometer, exits }))
    }

    /// Two distinct strategies give the same configuration and odometer.
    pub fn abelian(&self, inst: &Instance) -> Result<Verdict> {
        let mut rng = stream(derive_seed(inst.seed, &[0xAB]));
        let all = [
            Strategy::SweepLowToHigh,
            Strategy::QueueFifo,
            Strategy::ExhaustSiteThenNext,
            Strategy::RandomUnstable(rng.random()),
        ];
        let a = rng.random_range(0..4);
        let b = (a + rng.random_range(1..4)) % 4;
        let ra = self.run(&inst.cfg, &inst.volume, &inst.field, all[a], ToppleMode::Legal)?;
        let rb = self.run(&inst.cfg, &inst.volume, &inst.field, all[b], ToppleMode::Legal)?;
        Ok(match (ra, rb) {
            (Some(x), Some(y)) => Verdict::from(x.config == y.config && x.odometer == y.odometer),
            _ => Verdict::Skipped,
        })
    }

    /// `m^w <= m <= m^s` pointwise.
    pub fn sandwich(&self, inst: &Instance) -> Result<Verdict> {
        let Some(o) = inst.cfg.lattice().origin() else { return Ok(Verdict::Skipped) };
        if !inst.volume.contains(o) {
            return Ok(Verdict::Skipped);
        }
        let s = Strategy::ExhaustSiteThenNext;
        let w = self.run(&inst.cfg, &inst.volume, &inst.field, s, ToppleMode::WLegal)?;
        let m = self.run(&inst.cfg, &inst.volume, &inst.field, s, ToppleMode::Legal)?;
        let st = self.run(&inst.cfg, &inst.volume, &inst.field, s, ToppleMode::SLegal)?;
        Ok(match (w, m, st) {
            (Some(w), Some(m), Some(st)) => Verdict::from(w.odometer.le(&m.odometer) && m.odometer.le(&st.odometer)),
            _ => Verdict::Skipped,
        })
    }

    /// Jump odometer of strong stabilization of `eta` equals that of weak
    /// stabilization of `eta` plus an active particle at the origin.
    pub fn strong_minus_weak(&self, inst: &Instance) -> Result<Verdict> {
        let Some(o) = inst.cfg.lattice().origin() else { return Ok(Verdict::Skipped) };
        if !inst.volume.contains(o) {
            return Ok(Verdict::Skipped);
        }
        let s = Strategy::ExhaustSiteThenNext;
        let strong = self.run(&inst.cfg, &inst.volume, &inst.field, s, ToppleMode::SLegal)?;
        let mut plus = inst.cfg.clone();
        plus.add_active(o, 1);
        let weak = self.run(&plus, &inst.volume, &inst.field, s, ToppleMode::WLegal)?;
        Ok(match (strong, weak) {
            (Some(a), Some(b)) => Verdict::from(a.odometer.jump_odometer() == b.odometer.jump_odometer()),
            _ => Verdict::Skipped,
        })
    }

    /// `m_{V, eta} <= m_{V', eta'}` for `V` inside `V'` and `eta <= eta'`.
    pub fn monotone(&self, inst: &Instance) -> Result<Verdict> {
        let lattice = inst.cfg.lattice();
        let big = Volume::whole(lattice);
        let mut more = inst.cfg.clone();
        let mut rng = stream(derive_seed(inst.seed, &[0x30]));
        let sites: Vec<usize> = lattice.interior().collect();
        for _ in 0..rng.random_range(0..4) {
            let i = sites[rng.random_range(0..sites.len())];
            if more.get(i) == SiteState::Sleeping {
                more.set(i, SiteState::Active(1));
            }
            more.add_active(i, 1);
        }
        debug_assert!(inst.cfg.le(&more));
        let s = Strategy::QueueFifo;
        let small = self.run(&inst.cfg, &inst.volume, &inst.field, s, ToppleMode::Legal)?;
        let large = self.run(&more, &big, &inst.field, s, ToppleMode::Legal)?;
        Ok(match (small, large) {
            (Some(a), Some(b)) => Verdict::from(a.odometer.le(&b.odometer)),
            _ => Verdict::Skipped,
        })
    }

    /// Mass is conserved on closed domains and accounted for by exits otherwise.
    pub fn conservation(&self, inst: &Instance) -> Result<Verdict> {
        let Some(r) = self.run(&inst.cfg, &inst.volume, &inst.field, Strategy::QueueFifo, ToppleMode::Legal)? else {
            return Ok(Verdict::Skipped);
        };
        let before = inst.cfg.total_particles();
        let after = r.config.recount();
        Ok(Verdict::from(if inst.cfg.lattice().conserves_mass() {
            after == before && r.exits == 0
        } else {
            before == after + r.exits
        }))
    }

    /// An absorbed continuous-time run ends where the engine does.
    pub fn ct_agrees(&self, inst: &Instance) -> Result<Verdict> {
        let whole = Volume::whole(inst.cfg.lattice());
        let ct = ct_run(&inst.cfg, &inst.field, derive_seed(inst.seed, &[0xC7]), 1e4, false)?;
        if ct.status != RunStatus::Absorbed {
            return Ok(Verdict::Skipped);
        }
        let Some(r) = self.run(&inst.cfg, &whole, &inst.field, Strategy::ExhaustSiteThenNext, ToppleMode::Legal)? else {
            return Ok(Verdict::Skipped);
        };
        Ok(Verdict::from(ct.config == r.config && ct.odometer == r.odometer))
    }
}

pub type Check = fn(&Checker, &Instance) -> Result<Verdict>;

pub const CHECKS: [(&str, Check); 6] = [
    ("abelian", Checker::abelian),
    ("sandwich", Checker::sandwich),
    ("strong_minus_weak", Checker::strong_minus_weak),
    ("monotone", Checker::monotone),
    ("conservation", Checker::conservation),
    ("ct_engine", Checker::ct_agrees),
];

#[derive(Debug, Clone)]
pub struct Violation {
    pub check: &'static str,
    pub instance: Instance,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub checks_run: u64,
    pub skipped: u64,
    pub violation: Option<Violation>,
}

/// Runs every check on `seeds` random instances and stops at the first
/// violation. Instances are derived from `master` and the instance index.
pub fn run_validate(seeds: u64, master: u64, fault: Option<Fault>) -> Result<Report> {
    let checker = Checker { fault };
    let mut report = Report::default();
    for i in 0..seeds {
        let inst = random_instance(derive_seed(master, &[i]));
        for (name, check) in CHECKS {
            match check(&checker, &inst)? {
                Verdict::Holds => report.checks_run += 1,
                Verdict::Skipped => report.skipped += 1,
                Verdict::Violated => {
                    report.checks_run += 1;
                    report.violation = Some(Violation { check: name, instance: inst });
                    return Ok(report);
                }
            }
        }
    }
    Ok(report)
}
