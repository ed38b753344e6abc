//! Left-to-right sweep for the totally asymmetric walk: the flow into the
//! origin behaves like a reflected walk with drift `zeta - lambda/(1+lambda)`.

use arw::field::InstructionField;
use arw::model::{sample_initial, Boundary, InitialState, JumpDistribution, Lattice, ModelParams, SleepRate};
use arw::procedures::directed_sweep;
use arw::rng::derive_seed;
use arw::stats::Estimate;

fn main() -> arw::Result<()> {
    let l = 1000;
    let lattice = Lattice::cube(1, l, Boundary::Kill)?;
    let params = ModelParams::new(SleepRate::Finite(1.0), JumpDistribution::directed_1d());
    for zeta in [0.3, 0.5, 0.7] {
        let mut inflow = Vec::new();
        for r in 0..100 {
            let cfg = sample_initial(&InitialState::poisson(zeta)?, &lattice, derive_seed(1, &[r]))?;
            let field = InstructionField::new(derive_seed(2, &[r]), params.clone());
            inflow.push(directed_sweep(&cfg, &field)?.inflow() as f64);
        }
        let e = Estimate::from_samples(&inflow);
        println!("zeta {zeta}: inflow at the origin {:.1} +- {:.1} (drift prediction {:.0})", e.mean, e.stderr, ((zeta - 0.5) * f64::from(l)).max(0.0));
    }
    Ok(())
}
