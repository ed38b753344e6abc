use rand::Rng;
use rayon::prelude::*;

use crate::engine::{Engine, Status, Strategy, ToppleMode};
use crate::error::{Error, Result};
use crate::field::InstructionField;
use crate::model::{sample_initial, Boundary, Configuration, InitialState, Lattice, Volume};
use crate::rng::{derive_seed, stream};
use crate::stats::{batch_means, quantile_sorted, Estimate};

use super::spec::{ExperimentKind, ExperimentSpec};
use super::table::ResultTable;

/// Summary of one stabilization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Outcome {
    origin: u64,
    exits: u64,
    topplings: u64,
    remaining: u64,
    censored: bool,
}

fn field_for(spec: &ExperimentSpec, replica_seed: u64) -> InstructionField {
    InstructionField::new(derive_seed(replica_seed, &[2]), spec.params())
}

fn stabilize_once(spec: &ExperimentSpec, initial: &InitialState, lattice: &Lattice, r: u64) -> Result<Outcome> {
    let rs = spec.replica_seed(r);
    let cfg = sample_initial(initial, lattice, derive_seed(rs, &[1]))?;
    let mut e = Engine::new(cfg, field_for(spec, rs))?;
    let status = e.stabilize(&Volume::whole(lattice), Strategy::ExhaustSiteThenNext, ToppleMode::Legal, spec.budget)?;
    Ok(Outcome {
        origin: e.origin().map_or(0, |o| e.odometer().get(o)),
        exits: e.exits(),
        topplings: e.topplings(),
        remaining: e.config().total_particles(),
        censored: status == Status::BudgetExceeded,
    })
}

/// All replicas on one lattice, in replica order.
fn replicate(spec: &ExperimentSpec, initial: &InitialState, lattice: &Lattice) -> Result<Vec<Outcome>> {
    (0..spec.replicas).into_par_iter().map(|r| stabilize_once(spec, initial, lattice, r)).collect()
}

fn uncensored(out: &[Outcome]) -> (Vec<Outcome>, u64) {
    let kept: Vec<Outcome> = out.iter().filter(|o| !o.censored).copied().collect();
    let censored = (out.len() - kept.len()) as u64;
    (kept, censored)
}

fn proportion(kept: &[Outcome], pred: impl Fn(&Outcome) -> bool) -> Estimate {
    Estimate::proportion(kept.iter().filter(|o| pred(o)).count() as u64, kept.len() as u64)
}

fn mean_of(kept: &[Outcome], f: impl Fn(&Outcome) -> f64) -> Estimate {
    Estimate::from_samples(&kept.iter().map(f).collect::<Vec<_>>())
}

fn kill_cube(spec: &ExperimentSpec, radius: u32) -> Result<Lattice> {
    Lattice::cube(spec.dim, radius, Boundary::Kill)
}

fn zeta(initial: &InitialState) -> f64 {
    initial.density().unwrap_or(f64::NAN)
}

/// Runs the driver selected by `spec.kind`.
pub fn run(spec: &ExperimentSpec) -> Result<ResultTable> {
    spec.validate()?;
    match spec.kind {
        ExperimentKind::ConditionB => run_condition_b(spec),
        ExperimentKind::ConditionU => run_condition_u(spec),
        ExperimentKind::ConditionE => run_condition_e(spec),
        ExperimentKind::PhaseScan => run_phase_scan(spec),
        ExperimentKind::RingFixedEnergy => run_ring(spec),
        ExperimentKind::DrivenDissipative => run_driven_dissipative(spec),
        ExperimentKind::UniversalityCheck => run_universality_check(spec),
        ExperimentKind::FewStayProbe => run_fewstay_probe(spec),
    }
}

/// Empirical `P(m(0) <= k)` for each box radius and threshold.
pub fn run_condition_b(spec: &ExperimentSpec) -> Result<ResultTable> {
    let mut t = ResultTable::new(spec.clone());
    let z = zeta(&spec.initial);
    for &n in &spec.sizes {
        let (kept, c) = uncensored(&replicate(spec, &spec.initial, &kill_cube(spec, n)?)?);
        for &k in &spec.k_grid {
            t.push(z, n.into(), k, "P(m0<=k)", proportion(&kept, |o| o.origin as f64 <= k), c);
        }
        t.push(z, n.into(), f64::NAN, "m0_mean", mean_of(&kept, |o| o.origin as f64), c);
    }
    Ok(t)
}

/// Empirical `P(m(0) >= k)`, plus the threshold `sqrt(n)`.
pub fn run_condition_u(spec: &ExperimentSpec) -> Result<ResultTable> {
    let mut t = ResultTable::new(spec.clone());
    let z = zeta(&spec.initial);
    for &n in &spec.sizes {
        let (kept, c) = uncensored(&replicate(spec, &spec.initial, &kill_cube(spec, n)?)?);
        for &k in &spec.k_grid {
            t.push(z, n.into(), k, "P(m0>=k)", proportion(&kept, |o| o.origin as f64 >= k), c);
        }
        let root = f64::from(n).sqrt();
        t.push(z, n.into(), root, "P(m0>=sqrt(n))", proportion(&kept, |o| o.origin as f64 >= root), c);
        t.push(z, n.into(), f64::NAN, "m0_mean", mean_of(&kept, |o| o.origin as f64), c);
    }
    Ok(t)
}

fn exit_rows(t: &mut ResultTable, spec: &ExperimentSpec, initial: &InitialState, suffix: &str) -> Result<Vec<Estimate>> {
    let z = zeta(initial);
    let mut out = Vec::new();
    for &n in &spec.sizes {
        let lattice = kill_cube(spec, n)?;
        let volume = lattice.interior_len() as f64;
        let (kept, c) = uncensored(&replicate(spec, initial, &lattice)?);
        let density = mean_of(&kept, |o| o.exits as f64 / volume);
        t.push(z, n.into(), f64::NAN, format!("exit_density{suffix}"), density, c);
        t.push(z, n.into(), f64::NAN, format!("topplings_mean{suffix}"), mean_of(&kept, |o| o.topplings as f64), c);
        out.push(density);
    }
    Ok(out)
}

/// Mean number of particles killed at the boundary per site of the box.
pub fn run_condition_e(spec: &ExperimentSpec) -> Result<ResultTable> {
    let mut t = ResultTable::new(spec.clone());
    exit_rows(&mut t, spec, &spec.initial, "")?;
    Ok(t)
}

/// Exit density and origin odometer over a grid of densities.
pub fn run_phase_scan(spec: &ExperimentSpec) -> Result<ResultTable> {
    let mut t = ResultTable::new(spec.clone());
    for &z in &spec.zetas {
        let initial = spec.initial.with_density(z)?;
        for &n in &spec.sizes {
            let lattice = kill_cube(spec, n)?;
            let volume = lattice.interior_len() as f64;
            let (kept, c) = uncensored(&replicate(spec, &initial, &lattice)?);
            t.push(z, n.into(), f64::NAN, "exit_density", mean_of(&kept, |o| o.exits as f64 / volume), c);
            t.push(z, n.into(), f64::NAN, "m0_mean", mean_of(&kept, |o| o.origin as f64), c);
        }
    }
    Ok(t)
}

/// Exit densities for every initial law at one density, with the z-score of
/// each alternative against the first law.
pub fn run_universality_check(spec: &ExperimentSpec) -> Result<ResultTable> {
    let base = zeta(&spec.initial);
    for alt in &spec.alternatives {
        let z = zeta(alt);
        if (z - base).abs() > 1e-12 {
            return Err(Error::DensityMismatch(base, z));
        }
    }
    let mut t = ResultTable::new(spec.clone());
    let first = exit_rows(&mut t, spec, &spec.initial, &format!("[{}]", spec.initial.label()))?;
    for alt in &spec.alternatives {
        let other = exit_rows(&mut t, spec, alt, &format!("[{}]", alt.label()))?;
        for ((a, b), &n) in first.iter().zip(&other).zip(&spec.sizes) {
            let pooled = a.pooled_stderr(b);
            let z = if pooled > 0.0 { (a.mean - b.mean) / pooled } else if a.mean == b.mean { 0.0 } else { f64::INFINITY };
            let e = Estimate { mean: z, stderr: 0.0, n: a.n.min(b.n) };
            t.push(base, n.into(), f64::NAN, format!("z_score[{}-{}]", spec.initial.label(), alt.label()), e, 0);
        }
    }
    Ok(t)
}

/// `T / (n log^2 n)` per replica, censored replicas as infinity.
fn ring_coefficients(spec: &ExperimentSpec, n: u32) -> Result<(Vec<f64>, u64)> {
    let lattice = Lattice::torus(1, n)?;
    let out = replicate(spec, &spec.initial, &lattice)?;
    let scale = f64::from(n) * f64::from(n).ln().powi(2);
    let mut coef: Vec<f64> =
        out.iter().map(|o| if o.censored { f64::INFINITY } else { o.topplings as f64 / scale }).collect();
    coef.sort_by(f64::total_cmp);
    let censored = out.iter().filter(|o| o.censored).count() as u64;
    Ok((coef, censored))
}

/// 99th percentile of `T / (n log^2 n)` at ring length `n`.
pub fn calibrate_kappa(spec: &ExperimentSpec, n: u32) -> Result<f64> {
    let (coef, _) = ring_coefficients(spec, n)?;
    Ok(quantile_sorted(&coef, 0.99))
}

/// Total topplings to absorb on a ring. Quantiles that fall among censored
/// replicas are reported as infinite.
pub fn run_ring(spec: &ExperimentSpec) -> Result<ResultTable> {
    let mut t = ResultTable::new(spec.clone());
    let z = zeta(&spec.initial);
    for &n in &spec.sizes {
        let (coef, c) = ring_coefficients(spec, n)?;
        let total = coef.len() as u64;
        let scale = f64::from(n) * f64::from(n).ln().powi(2);
        t.push(z, n.into(), f64::NAN, "censored_fraction", Estimate::proportion(c, total), c);
        for p in [0.5, 0.9, 0.99] {
            let q = quantile_sorted(&coef, p) * scale;
            t.push(z, n.into(), p, "T_quantile", Estimate { mean: q, stderr: f64::NAN, n: total }, c);
        }
        t.push(z, n.into(), 0.99, "kappa_quantile", Estimate { mean: quantile_sorted(&coef, 0.99), stderr: f64::NAN, n: total }, c);
        for &kappa in &spec.k_grid {
            let hits = coef.iter().filter(|&&x| x <= kappa).count() as u64;
            t.push(z, n.into(), kappa, "P(T<=kappa n log^2 n)", Estimate::proportion(hits, total), c);
        }
    }
    Ok(t)
}

/// Density trace of one driven-dissipative chain on a box of side `side`.
pub fn driven_dissipative_trace(spec: &ExperimentSpec, side: u32, r: u64) -> Result<Option<Vec<f64>>> {
    let lattice = Lattice::boxed(vec![0; spec.dim], vec![i64::from(side) - 1; spec.dim], Boundary::Kill)?;
    let rs = spec.replica_seed(r);
    let mut e = Engine::new(Configuration::empty(lattice.clone()), field_for(spec, rs))?;
    let mut rng = stream(derive_seed(rs, &[3]));
    let sites: Vec<usize> = lattice.interior().collect();
    let whole = Volume::whole(&lattice);
    let volume = sites.len() as f64;
    let mut trace = Vec::with_capacity(spec.steps as usize);
    for _ in 0..spec.steps {
        let x = sites[rng.random_range(0..sites.len())];
        e.add_particles(x, 1);
        if e.stabilize(&whole, Strategy::ExhaustSiteThenNext, ToppleMode::Legal, spec.budget)? == Status::BudgetExceeded {
            return Ok(None);
        }
        trace.push(e.config().total_particles() as f64 / volume);
    }
    Ok(Some(trace))
}

/// Stationary density of the driven-dissipative chain by batch means (20
/// batches after a 20% burn-in). Several replicas are combined through their
/// chain means.
pub fn run_driven_dissipative(spec: &ExperimentSpec) -> Result<ResultTable> {
    let mut t = ResultTable::new(spec.clone());
    for &side in &spec.sizes {
        let traces: Vec<Option<Vec<f64>>> =
            (0..spec.replicas).into_par_iter().map(|r| driven_dissipative_trace(spec, side, r)).collect::<Result<_>>()?;
        let censored = traces.iter().filter(|x| x.is_none()).count() as u64;
        let per_chain: Vec<Estimate> = traces.iter().flatten().map(|tr| batch_means(tr, 0.2, 20)).collect();
        let e = match per_chain.as_slice() {
            [one] => *one,
            many => {
                let mut e = Estimate::from_samples(&many.iter().map(|e| e.mean).collect::<Vec<_>>());
                e.n = many.len() as u64;
                e
            }
        };
        t.push(f64::NAN, side.into(), f64::NAN, "stationary_density", e, censored);
    }
    Ok(t)
}

/// Tail of the mass retained in `{1, ..., r-1}` after stabilizing with
/// killing at `0` and `r`.
pub fn run_fewstay_probe(spec: &ExperimentSpec) -> Result<ResultTable> {
    let mut t = ResultTable::new(spec.clone());
    let z = zeta(&spec.initial);
    for &r in &spec.sizes {
        if r < 2 {
            return Err(Error::InvalidSpec("few-stay probe needs r >= 2".into()));
        }
        let lattice = Lattice::boxed(vec![1], vec![i64::from(r) - 1], Boundary::Kill)?;
        let (kept, c) = uncensored(&replicate(spec, &spec.initial, &lattice)?);
        for &rho in &spec.k_grid {
            let e = proportion(&kept, |o| o.remaining as f64 >= rho * f64::from(r));
            t.push(z, r.into(), rho, "P(retained>=rho r)", e, c);
        }
        t.push(z, r.into(), f64::NAN, "retained_mean", mean_of(&kept, |o| o.remaining as f64), c);
    }
    Ok(t)
}
