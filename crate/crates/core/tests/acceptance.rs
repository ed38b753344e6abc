//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::time::{Duration, Instant};

use arw::dynamics::{exit_counts, LabeledSystem};
use arw::engine::{successive_weak, Status, DEFAULT_BUDGET};
use arw::experiments::{calibrate_kappa, run, ExperimentKind, ExperimentSpec};
use arw::field::InstructionField;
use arw::model::{
    sample_initial, Boundary, Configuration, InitialState, JumpDistribution, Lattice, ModelParams, SiteState, SleepRate,
    Volume,
};
use arw::procedures::{
    block_functions, block_lattice, directed_sweep, green_function_estimate, killed_walk_prob, trap_explore, TrapOptions,
};
use arw::rng::derive_seed;
use arw::stats::Estimate;
use arw::validate::{random_instance, Check, Checker, Verdict};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn params(lambda: f64, jumps: JumpDistribution) -> ModelParams {
    ModelParams::new(SleepRate::Finite(lambda), jumps)
}

/// Runs `check` until `wanted` instances were decided; skipped ones are replaced.
fn exact(check: Check, wanted: u64, salt: u64) -> Outcome {
    let checker = Checker::default();
    let (mut held, mut violated, mut skipped, mut i) = (0u64, 0u64, 0u64, 0u64);
    while held + violated < wanted {
        let inst = random_instance(derive_seed(salt, &[i]));
        i += 1;
        match check(&checker, &inst).expect("check runs") {
            Verdict::Holds => held += 1,
            Verdict::Violated => {
                violated += 1;
                eprintln!("violation on\n{inst}");
            }
            Verdict::Skipped => skipped += 1,
        }
    }
    outcome(violated == 0, format!("{held} hold, {violated} violated, {skipped} skipped"))
}

fn abelianness() -> Outcome {
    let t = Instant::now();
    let mut o = exact(Checker::abelian, 1000, 1);
    let elapsed = t.elapsed();
    o.pass &= elapsed < Duration::from_secs(120);
    o.detail = format!("{}, {:.1}s", o.detail, elapsed.as_secs_f64());
    o
}

fn sandwich() -> Outcome {
    exact(Checker::sandwich, 500, 2)
}

fn strong_minus_weak() -> Outcome {
    exact(Checker::strong_minus_weak, 500, 3)
}

fn monotonicity() -> Outcome {
    exact(Checker::monotone, 500, 4)
}

fn conservation() -> Outcome {
    exact(Checker::conservation, 500, 5)
}

fn directed_critical_density() -> Outcome {
    let t = Instant::now();
    let l = 1000u32;
    let lattice = Lattice::cube(1, l, Boundary::Kill).unwrap();
    let initial = InitialState::poisson(0.6).unwrap();
    let flows: Vec<f64> = (0..200)
        .map(|r| {
            let seed = derive_seed(6, &[r]);
            let cfg = sample_initial(&initial, &lattice, derive_seed(seed, &[1])).unwrap();
            let field = InstructionField::new(derive_seed(seed, &[2]), params(1.0, JumpDistribution::directed_1d()));
            directed_sweep(&cfg, &field).unwrap().inflow() as f64
        })
        .collect();
    let n = Estimate::from_samples(&flows);
    let lf = f64::from(l);
    let supercritical = n.mean >= 0.05 * lf && n.mean <= 0.15 * lf;

    let mut spec = ExperimentSpec::new(
        ExperimentKind::ConditionB,
        JumpDistribution::directed_1d(),
        SleepRate::Finite(1.0),
        InitialState::poisson(0.4).unwrap(),
    );
    spec.sizes = vec![100, 300, 1000];
    spec.k_grid = vec![50.0];
    spec.replicas = 200;
    spec.master_seed = 6;
    let table = run(&spec).unwrap();
    let probs: Vec<f64> = table.select("P(m0<=k)").map(|r| r.estimate).collect();
    let subcritical = probs.iter().all(|&p| p >= 0.2);
    let elapsed = t.elapsed();
    outcome(
        supercritical && subcritical && elapsed < Duration::from_secs(300),
        format!(
            "mean N_L = {:.2} +- {:.2} (band [{}, {}]); P(m0<=50) over L=100,300,1000: {:?}; {:.1}s",
            n.mean,
            n.stderr,
            0.05 * lf,
            0.15 * lf,
            probs,
            elapsed.as_secs_f64()
        ),
    )
}

fn killed_walk_exactness() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, lambda) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        let r = killed_walk_prob(&JumpDistribution::directed_1d(), &[1.0], lambda, 100_000, 1000, 70 + i as u64);
        let q = lambda / (1.0 + lambda);
        let ok = (r.estimate.mean - q).abs() <= 3.0 * r.estimate.stderr;
        pass &= ok;
        parts.push(format!("lambda {lambda}: {:.5} +- {:.5} vs {q:.5}", r.estimate.mean, r.estimate.stderr));
    }
    outcome(pass, parts.join("; "))
}

fn trap_law() -> Outcome {
    let per_side = 10usize;
    let spacing = 20i64;
    let radius = (per_side as i64 + 1) * spacing;
    let lattice = Lattice::cube(1, radius as u32, Boundary::Kill).unwrap();
    let mut cfg = Configuration::empty(lattice);
    for k in 1..=per_side as i64 {
        cfg.set_at(&[k * spacing], SiteState::Active(1)).unwrap();
        cfg.set_at(&[-k * spacing], SiteState::Active(1)).unwrap();
    }
    let opts = TrapOptions { particles_per_side: per_side, jump_cap: 1_000_000, verify: true };
    let mut gaps = Vec::new();
    let (mut successes, mut unverified, mut replicas) = (0u64, 0u64, 0u64);
    while gaps.len() < 10_000 {
        let field = InstructionField::new(derive_seed(8, &[replicas]), params(1.0, JumpDistribution::symmetric(1)));
        replicas += 1;
        let r = trap_explore(&cfg, &field, opts).unwrap();
        if r.status == arw::procedures::TrapStatus::Success {
            successes += 1;
            unverified += u64::from(r.origin_odometer != Some(0));
        }
        gaps.extend(r.interdistances.iter().map(|&g| g as f64));
    }
    let e = Estimate::from_samples(&gaps);
    outcome(
        (e.mean - 2.0).abs() <= 5.0 * e.stderr && unverified == 0,
        format!(
            "{} traps from {replicas} explorations ({successes} full successes, {unverified} with toppled origin): mean {:.4} +- {:.4}",
            gaps.len(),
            e.mean,
            e.stderr
        ),
    )
}

fn block_inequality() -> Outcome {
    let mut failures = 0;
    let mut checked = 0;
    for k in [4u32, 8] {
        let lattice = block_lattice(k).unwrap();
        for i in 0..200u64 {
            let seed = derive_seed(9, &[u64::from(k), i]);
            let mut block = sample_initial(&InitialState::bernoulli(0.5).unwrap(), &lattice, seed).unwrap();
            block.set_at(&[-i64::from(k)], SiteState::Empty).unwrap();
            block.set_at(&[i64::from(k)], SiteState::Empty).unwrap();
            let field = InstructionField::new(seed ^ 0xB10C, params(1.0, JumpDistribution::symmetric(1)));
            let f = block_functions(&block, &field, 200, DEFAULT_BUDGET).unwrap();
            let kk = u64::from(k);
            let mut ok = (0..=200).all(|m| f.t[m] == f.l[m] + f.r[m] + f.s[m]);
            for m in 0..=200usize {
                for m2 in m + 1..=200usize {
                    ok &= f.l[m2] <= f.l[m] + (m2 - m) as u64 + 2 * kk;
                }
            }
            checked += 1;
            if !ok {
                failures += 1;
            }
        }
    }
    outcome(failures == 0, format!("{checked} fields, {failures} violating"))
}

fn ring_phase_separation() -> Outcome {
    let t = Instant::now();
    let spec_for = |lambda: f64, n: u32| {
        let mut s = ExperimentSpec::new(
            ExperimentKind::RingFixedEnergy,
            JumpDistribution::symmetric(1),
            SleepRate::Finite(lambda),
            InitialState::poisson(0.5).unwrap(),
        );
        s.sizes = vec![n];
        s.replicas = 100;
        s.budget = 10_000_000;
        s.master_seed = 10;
        s
    };
    let kappa = calibrate_kappa(&spec_for(20.0, 64), 64).unwrap();
    let mut fast = spec_for(20.0, 128);
    fast.k_grid = vec![kappa];
    let fast_t = run(&fast).unwrap();
    let fast_frac = fast_t.select("P(T<=kappa n log^2 n)").next().unwrap().estimate;
    let slow_t = run(&spec_for(0.05, 128)).unwrap();
    let slow_frac = slow_t.select("censored_fraction").next().unwrap().estimate;
    let elapsed = t.elapsed();
    outcome(
        fast_frac >= 0.9 && slow_frac >= 0.9 && elapsed < Duration::from_secs(600),
        format!(
            "kappa = {kappa:.4}; lambda 20: {:.2} within bound; lambda 0.05: {:.2} censored; {:.1}s",
            fast_frac,
            slow_frac,
            elapsed.as_secs_f64()
        ),
    )
}

fn ct_equivalence() -> Outcome {
    exact(Checker::ct_agrees, 500, 11)
}

fn flux_ordering() -> Outcome {
    let lattice = Lattice::cube(1, 50, Boundary::Kill).unwrap();
    let p = params(1.0, JumpDistribution::directed_1d());
    let initial = InitialState::poisson(0.6).unwrap();
    let (mut m, mut ms, mut flagged) = (Vec::new(), Vec::new(), 0);
    for r in 0..500u64 {
        let seed = derive_seed(12, &[r]);
        let cfg = sample_initial(&initial, &lattice, derive_seed(seed, &[1])).unwrap();
        let field = InstructionField::new(derive_seed(seed, &[2]), p.clone());
        let sys = LabeledSystem::new(p.clone(), derive_seed(seed, &[3]));
        let c = exit_counts(&cfg, &field, &sys, 1e9, DEFAULT_BUDGET).unwrap();
        flagged += u32::from(c.proxy_too_small);
        m.push(c.m_n as f64);
        ms.push(c.m_n_star as f64);
    }
    let (a, b) = (Estimate::from_samples(&m), Estimate::from_samples(&ms));
    outcome(
        a.mean <= b.mean + 2.0 * a.pooled_stderr(&b),
        format!("M_n {:.3} +- {:.3}, M_n* {:.3} +- {:.3}, proxy flagged {flagged}", a.mean, a.stderr, b.mean, b.stderr),
    )
}

fn universality() -> Outcome {
    let mut s = ExperimentSpec::new(
        ExperimentKind::UniversalityCheck,
        JumpDistribution::directed_1d(),
        SleepRate::Finite(1.0),
        InitialState::poisson(0.6).unwrap(),
    );
    s.alternatives = vec![InitialState::mixture(0.6).unwrap()];
    s.sizes = vec![1000];
    s.replicas = 200;
    s.master_seed = 13;
    let t = run(&s).unwrap();
    let a = t.select("exit_density[poisson]").next().unwrap();
    let b = t.select("exit_density[mixture]").next().unwrap();
    let pooled = (a.stderr * a.stderr + b.stderr * b.stderr).sqrt();
    outcome(
        (a.estimate - b.estimate).abs() <= 3.0 * pooled,
        format!("poisson {:.5} +- {:.5}, mixture {:.5} +- {:.5}", a.estimate, a.stderr, b.estimate, b.stderr),
    )
}

fn successive_weak_bound() -> Outcome {
    let g = green_function_estimate(&JumpDistribution::symmetric(3), 20_000, 10_000, 14);
    let lattice = Lattice::window_cube(3, 8).unwrap();
    let vol = Volume::whole(&lattice);
    let p = params(1.0, JumpDistribution::symmetric(3));
    let initial = InitialState::poisson(0.3).unwrap();
    let mut rounds = Vec::new();
    let mut censored = 0;
    for r in 0..500u64 {
        let seed = derive_seed(14, &[r]);
        let cfg = sample_initial(&initial, &lattice, derive_seed(seed, &[1])).unwrap();
        let field = InstructionField::new(derive_seed(seed, &[2]), p.clone());
        let s = successive_weak(&cfg, &vol, &field, DEFAULT_BUDGET).unwrap();
        if s.status == Status::BudgetExceeded {
            censored += 1;
        } else {
            rounds.push(s.rounds_to_strong as f64);
        }
    }
    let t = Estimate::from_samples(&rounds);
    let sigma = (t.stderr.powi(2) + 4.0 * g.estimate.stderr.powi(2)).sqrt();
    outcome(
        censored == 0 && t.mean <= 2.0 * g.estimate.mean + 3.0 * sigma,
        format!(
            "E T_V^s = {:.4} +- {:.4}, G = {:.4} +- {:.4}, bound {:.4}, censored {censored}",
            t.mean,
            t.stderr,
            g.estimate.mean,
            g.estimate.stderr,
            2.0 * g.estimate.mean + 3.0 * sigma
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 14] = [
        ("abelianness", abelianness),
        ("odometer sandwich", sandwich),
        ("strong minus weak", strong_minus_weak),
        ("monotonicity", monotonicity),
        ("conservation", conservation),
        ("directed critical density", directed_critical_density),
        ("killed walk exactness", killed_walk_exactness),
        ("trap interdistance law", trap_law),
        ("block inequality", block_inequality),
        ("ring phase separation", ring_phase_separation),
        ("continuous time equals engine", ct_equivalence),
        ("particle and site flux ordering", flux_ordering),
        ("universality proxy", universality),
        ("successive weak round bound", successive_weak_bound),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|x| name.contains(x.as_str())) {
            continue;
        }
        let t = Instant::now();
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name}: {} [{:.1}s]", i + 1, o.detail, t.elapsed().as_secs_f64());
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
