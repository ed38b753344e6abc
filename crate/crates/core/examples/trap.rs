//! Trap exploration in one dimension: particles on both sides of the origin
//! are settled into traps without ever toppling the origin.

use arw::field::InstructionField;
use arw::model::{Boundary, Configuration, JumpDistribution, Lattice, ModelParams, SiteState, SleepRate};
use arw::procedures::{trap_explore, TrapOptions, TrapStatus};
use arw::rng::derive_seed;
use arw::stats::Estimate;

fn main() -> arw::Result<()> {
    let (per_side, spacing) = (5i64, 30i64);
    let lattice = Lattice::cube(1, ((per_side + 1) * spacing) as u32, Boundary::Kill)?;
    let mut cfg = Configuration::empty(lattice);
    for k in 1..=per_side {
        cfg.set_at(&[k * spacing], SiteState::Active(1))?;
        cfg.set_at(&[-k * spacing], SiteState::Active(1))?;
    }
    let params = ModelParams::new(SleepRate::Finite(1.0), JumpDistribution::symmetric(1));
    let opts = TrapOptions { particles_per_side: per_side as usize, ..TrapOptions::default() };

    let mut gaps = Vec::new();
    let mut successes = 0;
    for r in 0..200 {
        let res = trap_explore(&cfg, &InstructionField::new(derive_seed(5, &[r]), params.clone()), opts)?;
        if res.status == TrapStatus::Success {
            successes += 1;
            if successes == 1 {
                println!("first success: traps {:?} and {:?}, origin odometer {:?}", res.positive, res.negative, res.origin_odometer);
            }
        }
        gaps.extend(res.interdistances.iter().map(|&g| g as f64));
    }
    let e = Estimate::from_samples(&gaps);
    println!("{successes}/200 explorations succeeded");
    println!("{} interdistances, mean {:.3} +- {:.3} (geometric mean 2)", gaps.len(), e.mean, e.stderr);
    Ok(())
}
