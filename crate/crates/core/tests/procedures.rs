use rand::Rng;
use rand_distr::{Distribution, Poisson};

use arw::engine::DEFAULT_BUDGET;
use arw::field::{Instruction, InstructionField};
use arw::model::{
    sample_initial, Boundary, Configuration, InitialState, JumpDistribution, Lattice, ModelParams, SleepRate,
};
use arw::procedures::{
    block_functions, block_lattice, directed_sweep, green_function_estimate, killed_walk_prob, safe_zone_drive, urn_run,
};
use arw::rng::{derive_seed, stream};
use arw::stats::Estimate;

fn field(seed: u64, lambda: f64, jumps: JumpDistribution) -> InstructionField {
    InstructionField::new(seed, ModelParams::new(SleepRate::Finite(lambda), jumps))
}

/// Outflow of a directed site holding `m` particles: the first `m - 1` jumps
/// always leave; the instruction right after them decides the last particle.
fn outflow(f: &InstructionField, x: i64, m: u64) -> u64 {
    if m == 0 {
        return 0;
    }
    let mut j = 1;
    let mut jumps = 0;
    while jumps < m - 1 {
        if f.instruction_at(&[x], j).is_jump() {
            jumps += 1;
        }
        j += 1;
    }
    match f.instruction_at(&[x], j) {
        Instruction::Sleep => m - 1,
        Instruction::Jump(_) => m,
    }
}

#[test]
fn sweep_flow_matches_instruction_oracle() {
    let l = 80;
    let lattice = Lattice::cube(1, l, Boundary::Kill).unwrap();
    for seed in 0..50 {
        let cfg = sample_initial(&InitialState::poisson(0.7).unwrap(), &lattice, seed).unwrap();
        let f = field(seed ^ 0xF10, 1.0, JumpDistribution::directed_1d());
        let r = directed_sweep(&cfg, &f).unwrap();
        let mut n = 0;
        for (i, x) in (-(l as i64)..0).enumerate() {
            n = outflow(&f, x, n + u64::from(cfg.get_at(&[x]).unwrap().particle_count()));
            assert_eq!(r.flow[i + 1], n, "seed {seed} site {x}");
        }
    }
}

fn sweep_inflows(l: u32, zeta: f64, replicas: u64, salt: u64) -> Vec<u64> {
    let lattice = Lattice::cube(1, l, Boundary::Kill).unwrap();
    (0..replicas)
        .map(|r| {
            let seed = derive_seed(salt, &[r]);
            let cfg = sample_initial(&InitialState::poisson(zeta).unwrap(), &lattice, seed).unwrap();
            directed_sweep(&cfg, &field(seed ^ 1, 1.0, JumpDistribution::directed_1d())).unwrap().inflow()
        })
        .collect()
}

/// Direct simulation of the reflected walk `N <- [N + eta - Y]^+`.
fn reflected_walk(l: u32, zeta: f64, q: f64, replicas: u64, seed: u64) -> Vec<u64> {
    let poisson = Poisson::new(zeta).unwrap();
    (0..replicas)
        .map(|r| {
            let mut rng = stream(derive_seed(seed, &[r]));
            let mut n = 0u64;
            for _ in 0..l {
                let m = n + poisson.sample(&mut rng) as u64;
                n = if m > 0 && rng.random::<f64>() < q { m - 1 } else { m };
            }
            n
        })
        .collect()
}

#[test]
fn subcritical_sweep_stays_bounded() {
    let below = |xs: &[u64]| Estimate::proportion(xs.iter().filter(|&&n| n <= 20).count() as u64, xs.len() as u64);
    let small = below(&sweep_inflows(100, 0.4, 400, 21));
    let large = below(&sweep_inflows(1000, 0.4, 400, 22));
    assert!(large.mean >= small.mean - 3.0 * large.pooled_stderr(&small), "{small:?} {large:?}");
    let oracle = below(&reflected_walk(1000, 0.4, 0.5, 4000, 23));
    assert!((large.mean - oracle.mean).abs() <= 5.0 * large.pooled_stderr(&oracle).max(1e-3), "{large:?} {oracle:?}");
}

#[test]
fn supercritical_sweep_mean_matches_reflected_walk() {
    let sweep: Vec<f64> = sweep_inflows(300, 0.6, 300, 24).into_iter().map(|n| n as f64).collect();
    let oracle: Vec<f64> = reflected_walk(300, 0.6, 0.5, 3000, 25).into_iter().map(|n| n as f64).collect();
    let (a, b) = (Estimate::from_samples(&sweep), Estimate::from_samples(&oracle));
    assert!((a.mean - b.mean).abs() <= 5.0 * a.pooled_stderr(&b), "{a:?} {b:?}");
}

#[test]
fn urn_rarely_stops_early() {
    let early = (0..10_000u64).filter(|&s| urn_run(200, 0.5, derive_seed(31, &[s])).unwrap().k_star <= 120).count();
    assert!((early as f64) / 1e4 < 0.01, "{early}");
}

#[test]
fn urn_duration_grows_linearly() {
    let mean = |r: u64| {
        let ks: Vec<f64> = (0..2000u64).map(|s| urn_run(r, 0.5, derive_seed(32 + r, &[s])).unwrap().k_star as f64).collect();
        Estimate::from_samples(&ks).mean
    };
    let (a, b, c) = (mean(50), mean(100), mean(200));
    assert!(b >= 1.8 * a && c >= 1.8 * b, "{a} {b} {c}");
}

#[test]
fn symmetric_block_balances_left_and_right() {
    let k = 4;
    let lattice = block_lattice(k).unwrap();
    let (mut l, mut r) = (Vec::new(), Vec::new());
    for i in 0..300u64 {
        let f = field(derive_seed(41, &[i]), 1.0, JumpDistribution::symmetric(1));
        let b = block_functions(&Configuration::empty(lattice.clone()), &f, 100, DEFAULT_BUDGET).unwrap();
        b.check().unwrap();
        l.push(b.l[100] as f64);
        r.push(b.r[100] as f64);
    }
    let diff: Vec<f64> = l.iter().zip(&r).map(|(a, b)| a - b).collect();
    let d = Estimate::from_samples(&diff);
    let mean_r = Estimate::from_samples(&r).mean;
    assert!(d.mean.abs() <= 5.0 * d.stderr, "{d:?}");
    assert!((Estimate::from_samples(&l).mean / mean_r - 1.0).abs() < 0.05);
}

#[test]
fn biased_safe_zone_flux_is_positive() {
    let jumps = JumpDistribution::biased(2, 0.4).unwrap();
    let fv = killed_walk_prob(&jumps, &[1.0, 0.0], 0.1, 20_000, 100_000, 51).estimate.mean;
    for n in [10u32, 20] {
        let lattice = Lattice::cube(2, n, Boundary::Kill).unwrap();
        let sites = lattice.interior_len() as f64;
        let per_site: Vec<f64> = (0..20u64)
            .map(|s| {
                let seed = derive_seed(52, &[u64::from(n), s]);
                let cfg = sample_initial(&InitialState::bernoulli(0.5).unwrap(), &lattice, seed).unwrap();
                let r = safe_zone_drive(&cfg, &[1.0, 0.0], &field(seed ^ 3, 0.1, jumps.clone())).unwrap();
                assert!(r.exits + r.left_behind == cfg.total_particles());
                r.exits as f64 / sites
            })
            .collect();
        let e = Estimate::from_samples(&per_site);
        assert!(e.mean > 0.1, "n = {n}: {e:?}");
        assert!(e.mean >= 0.5 - fv - 5.0 * e.stderr, "n = {n}: {e:?} vs {fv}");
    }
}

#[test]
fn green_function_is_stable_across_horizons() {
    let j = JumpDistribution::symmetric(3);
    let short = green_function_estimate(&j, 20_000, 10_000, 61);
    let long = green_function_estimate(&j, 20_000, 100_000, 62);
    assert!(!short.not_transient);
    let diff = (short.estimate.mean - long.estimate.mean).abs();
    assert!(diff <= 2.0 * short.estimate.pooled_stderr(&long.estimate), "{short:?} {long:?}");
    assert!((long.estimate.mean - 1.516386).abs() <= 5.0 * long.estimate.stderr);
}
