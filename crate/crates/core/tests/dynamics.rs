use std::collections::HashMap;

use arw::dynamics::{ct_run, exit_counts, origin_transport, particlewise_run, LabeledSystem, RunStatus};
use arw::engine::{Status, DEFAULT_BUDGET};
use arw::field::InstructionField;
use arw::model::{
    sample_initial, Boundary, Configuration, InitialState, JumpDistribution, Lattice, ModelParams, SiteState, SleepRate,
};
use arw::rng::derive_seed;
use arw::stats::Estimate;

fn params(lambda: f64, jumps: JumpDistribution) -> ModelParams {
    ModelParams::new(SleepRate::Finite(lambda), jumps)
}

fn three_particles() -> Configuration {
    let mut cfg = Configuration::empty(Lattice::cube(1, 2, Boundary::Kill).unwrap());
    cfg.set_at(&[-1], SiteState::Active(1)).unwrap();
    cfg.set_at(&[0], SiteState::Active(1)).unwrap();
    cfg.set_at(&[1], SiteState::Active(1)).unwrap();
    cfg
}

fn law(samples: impl Iterator<Item = String>) -> HashMap<String, f64> {
    let mut counts = HashMap::new();
    let mut n = 0.0;
    for s in samples {
        *counts.entry(s).or_insert(0.0) += 1.0;
        n += 1.0;
    }
    counts.values_mut().for_each(|c| *c /= n);
    counts
}

#[test]
fn sitewise_and_particlewise_final_laws_agree() {
    let cfg = three_particles();
    let p = params(1.0, JumpDistribution::symmetric(1));
    let seeds = 10_000u64;
    let site = law((0..seeds).map(|s| {
        let field = InstructionField::new(derive_seed(1, &[s]), p.clone());
        let r = ct_run(&cfg, &field, derive_seed(2, &[s]), 1e6, false).unwrap();
        assert_eq!(r.status, RunStatus::Absorbed);
        r.config.to_snapshot()
    }));
    let particle = law((0..seeds).map(|s| {
        let r = particlewise_run(&cfg, &LabeledSystem::new(p.clone(), derive_seed(3, &[s])), 1e6, None, false).unwrap();
        assert_eq!(r.status, RunStatus::Absorbed);
        r.config.to_snapshot()
    }));
    let keys: std::collections::HashSet<&String> = site.keys().chain(particle.keys()).collect();
    let tv: f64 = keys
        .into_iter()
        .map(|k| (site.get(k).unwrap_or(&0.0) - particle.get(k).unwrap_or(&0.0)).abs())
        .sum::<f64>()
        / 2.0;
    assert!(tv < 0.05, "total variation {tv}");
}

#[test]
fn mass_sent_equals_mass_received_on_a_torus() {
    let lattice = Lattice::torus(1, 12).unwrap();
    let p = params(1.0, JumpDistribution::symmetric(1));
    let mut diff = Vec::new();
    for r in 0..2000u64 {
        let cfg = sample_initial(&InitialState::bernoulli(0.3).unwrap(), &lattice, derive_seed(4, &[r])).unwrap();
        let t = origin_transport(&cfg, &InstructionField::new(derive_seed(5, &[r]), p.clone()), DEFAULT_BUDGET).unwrap();
        assert_eq!(t.status, Status::Stable);
        diff.push(t.sent as f64 - t.received as f64);
    }
    let e = Estimate::from_samples(&diff);
    assert!(e.mean.abs() <= 3.0 * e.stderr, "{e:?}");
}

#[test]
fn directed_exit_flux_stays_positive() {
    let p = params(1.0, JumpDistribution::directed_1d());
    for n in [25u32, 50, 100] {
        let lattice = Lattice::cube(1, n, Boundary::Kill).unwrap();
        let sites = lattice.interior_len() as f64;
        let per_site: Vec<f64> = (0..100u64)
            .map(|r| {
                let seed = derive_seed(6, &[u64::from(n), r]);
                let cfg = sample_initial(&InitialState::poisson(0.6).unwrap(), &lattice, seed).unwrap();
                let field = InstructionField::new(seed ^ 1, p.clone());
                let c = exit_counts(&cfg, &field, &LabeledSystem::new(p.clone(), seed ^ 2), 1e9, DEFAULT_BUDGET).unwrap();
                assert!(!c.proxy_too_small);
                c.m_n as f64 / sites
            })
            .collect();
        let e = Estimate::from_samples(&per_site);
        assert!(e.mean >= 0.02, "n = {n}: {e:?}");
    }
}
