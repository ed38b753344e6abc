use proptest::prelude::*;

use arw::engine::{stabilize, Engine, Status, Strategy as Order, ToppleMode, DEFAULT_BUDGET};
use arw::field::InstructionField;
use arw::model::{Boundary, Configuration, JumpDistribution, Lattice, ModelParams, SiteState, SleepRate, Volume};

fn state() -> impl Strategy<Value = SiteState> {
    prop_oneof![Just(SiteState::Empty), Just(SiteState::Sleeping), (1u32..4).prop_map(SiteState::Active)]
}

fn kill_box(states: &[SiteState]) -> Configuration {
    let lattice = Lattice::boxed(vec![0], vec![states.len() as i64 - 1], Boundary::Kill).unwrap();
    let mut cfg = Configuration::empty(lattice);
    for (i, s) in states.iter().enumerate() {
        cfg.set_at(&[i as i64], *s).unwrap();
    }
    cfg
}

fn field(seed: u64, lambda: f64, jumps: JumpDistribution) -> InstructionField {
    InstructionField::new(seed, ModelParams::new(SleepRate::Finite(lambda), jumps))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sleeping_needs_a_lone_particle(s in state()) {
        let slept = s.try_sleep();
        match s {
            SiteState::Active(1) => prop_assert_eq!(slept.unwrap(), SiteState::Sleeping),
            SiteState::Active(n) if n >= 2 => prop_assert_eq!(slept.unwrap(), s),
            SiteState::Sleeping => prop_assert_eq!(slept.unwrap(), s),
            _ => prop_assert!(slept.is_err()),
        }
        prop_assert_eq!(s.add_particle(), SiteState::Active(s.particle_count() + 1));
    }

    #[test]
    fn adding_a_particle_wakes_the_site(s in state(), n in 1u32..3) {
        let mut cfg = kill_box(&[s]);
        let before = cfg.count(0);
        cfg.add_active(0, n);
        prop_assert_eq!(cfg.get(0), SiteState::Active(before + n));
    }

    #[test]
    fn snapshot_round_trips(states in prop::collection::vec(state(), 1..20)) {
        let cfg = kill_box(&states);
        let back = Configuration::from_snapshot(&cfg.to_snapshot()).unwrap();
        prop_assert_eq!(back, cfg);
    }

    #[test]
    fn stabilization_is_abelian(
        states in prop::collection::vec(state(), 2..14),
        seed in any::<u64>(),
        lambda in prop_oneof![Just(0.3), Just(1.0), Just(4.0)],
        order_seed in any::<u64>(),
    ) {
        let cfg = kill_box(&states);
        let f = field(seed, lambda, JumpDistribution::symmetric(1));
        let vol = Volume::whole(cfg.lattice());
        let a = stabilize(&cfg, &vol, &f, Order::QueueFifo, ToppleMode::Legal, DEFAULT_BUDGET).unwrap();
        let b = stabilize(&cfg, &vol, &f, Order::RandomUnstable(order_seed), ToppleMode::Legal, DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(a.status, Status::Stable);
        prop_assert_eq!(&a.config, &b.config);
        prop_assert_eq!(&a.odometer, &b.odometer);
        prop_assert_eq!(a.exits, b.exits);
        prop_assert!(a.config.is_absorbing());
    }

    #[test]
    fn legal_topplings_conserve_mass_on_a_torus(
        counts in prop::collection::vec(0u32..3, 3..10),
        seed in any::<u64>(),
        steps in 1usize..200,
    ) {
        let lattice = Lattice::torus(1, counts.len() as u32).unwrap();
        let mut cfg = Configuration::empty(lattice.clone());
        for (i, &n) in counts.iter().enumerate() {
            cfg.add_active(i, n);
        }
        let total = cfg.total_particles();
        let mut e = Engine::new(cfg, field(seed, 1.0, JumpDistribution::symmetric(1))).unwrap();
        for _ in 0..steps {
            let Some(x) = e.config().active_sites().next() else { break };
            e.topple(x, ToppleMode::Legal).unwrap();
            prop_assert_eq!(e.config().recount(), total);
        }
        prop_assert_eq!(e.config().total_particles(), total);
    }

    #[test]
    fn more_particles_topple_more(
        states in prop::collection::vec(state(), 2..12),
        extra in 0usize..12,
        seed in any::<u64>(),
    ) {
        let cfg = kill_box(&states);
        let mut bigger = cfg.clone();
        bigger.add_active(extra % states.len(), 1);
        let f = field(seed, 1.0, JumpDistribution::symmetric(1));
        let vol = Volume::whole(cfg.lattice());
        let a = stabilize(&cfg, &vol, &f, Order::ExhaustSiteThenNext, ToppleMode::Legal, DEFAULT_BUDGET).unwrap();
        let b = stabilize(&bigger, &vol, &f, Order::ExhaustSiteThenNext, ToppleMode::Legal, DEFAULT_BUDGET).unwrap();
        prop_assert!(a.odometer.le(&b.odometer));
    }
}
