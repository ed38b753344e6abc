//! Stabilize a random configuration with several toppling orders and check
//! that the final state and the odometer do not depend on the order.

use arw::engine::{stabilize, Strategy, ToppleMode, DEFAULT_BUDGET};
use arw::field::InstructionField;
use arw::model::{sample_initial, Boundary, InitialState, JumpDistribution, Lattice, ModelParams, SleepRate, Volume};

fn main() -> arw::Result<()> {
    let lattice = Lattice::cube(2, 6, Boundary::Kill)?;
    let cfg = sample_initial(&InitialState::poisson(0.8)?, &lattice, 7)?;
    let field = InstructionField::new(11, ModelParams::new(SleepRate::Finite(0.5), JumpDistribution::symmetric(2)));
    let vol = Volume::whole(&lattice);

    println!("{} particles on {} sites", cfg.total_particles(), lattice.interior_len());
    let orders = [Strategy::SweepLowToHigh, Strategy::QueueFifo, Strategy::ExhaustSiteThenNext, Strategy::RandomUnstable(3)];
    let mut results = Vec::new();
    for order in orders {
        let s = stabilize(&cfg, &vol, &field, order, ToppleMode::Legal, DEFAULT_BUDGET)?;
        println!("{order:?}: {} topplings, {} exits, {:?}", s.topplings, s.exits, s.status);
        results.push(s);
    }
    let same = results.windows(2).all(|w| w[0].config == w[1].config && w[0].odometer == w[1].odometer);
    println!("identical final state and odometer: {same}");
    println!("{} particles asleep in the box", results[0].config.sleepers_in(&vol));
    Ok(())
}
