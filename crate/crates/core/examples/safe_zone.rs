//! Drive particles along a biased direction and compare the exit flux with
//! the killing probability of a single walk.

use arw::field::InstructionField;
use arw::model::{sample_initial, Boundary, InitialState, JumpDistribution, Lattice, ModelParams, SleepRate};
use arw::procedures::{killed_walk_prob, safe_zone_drive, killed_walk::DEFAULT_HORIZON};

fn main() -> arw::Result<()> {
    let jumps = JumpDistribution::biased(2, 0.4)?;
    let v = [1.0, 0.0];
    for lambda in [0.05, 0.5, 2.0] {
        let f = killed_walk_prob(&jumps, &v, lambda, 20_000, DEFAULT_HORIZON, 1);
        let lattice = Lattice::cube(2, 15, Boundary::Kill)?;
        let cfg = sample_initial(&InitialState::bernoulli(0.5)?, &lattice, 2)?;
        let field = InstructionField::new(3, ModelParams::new(SleepRate::Finite(lambda), jumps.clone()));
        let r = safe_zone_drive(&cfg, &v, &field)?;
        let density = r.exits as f64 / lattice.interior_len() as f64;
        println!(
            "lambda {lambda}: F_v = {:.3} +- {:.3}, exits per site {density:.3}, lower bound {:.3}",
            f.estimate.mean,
            f.estimate.stderr,
            0.5 - f.estimate.mean
        );
    }
    Ok(())
}
