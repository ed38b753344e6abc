//! The same model built two ways: site clocks reading the instruction field,
//! and labeled particles with their own walks and sleep clocks.

use arw::dynamics::{ct_run, particlewise_run, LabeledSystem};
use arw::engine::{stabilize, Strategy, ToppleMode, DEFAULT_BUDGET};
use arw::field::InstructionField;
use arw::model::{sample_initial, Boundary, InitialState, JumpDistribution, Lattice, ModelParams, SleepRate, Volume};

fn main() -> arw::Result<()> {
    let lattice = Lattice::cube(1, 10, Boundary::Kill)?;
    let cfg = sample_initial(&InitialState::poisson(0.6)?, &lattice, 3)?;
    let params = ModelParams::new(SleepRate::Finite(1.0), JumpDistribution::symmetric(1));
    let field = InstructionField::new(8, params.clone());

    let ct = ct_run(&cfg, &field, 21, 1e6, true)?;
    let eng = stabilize(&cfg, &Volume::whole(&lattice), &field, Strategy::QueueFifo, ToppleMode::Legal, DEFAULT_BUDGET)?;
    println!("site clocks: {:?} at t = {:.2} after {} events", ct.status, ct.time, ct.events.len());
    println!("matches the discrete engine: {}", ct.config == eng.config && ct.odometer == eng.odometer);

    let pw = particlewise_run(&cfg, &LabeledSystem::new(params, 8), 1e6, None, false)?;
    println!("labeled particles: {:?} at t = {:.2}, {} exits", pw.status, pw.time, pw.exits.len());
    for (i, p) in pw.particles.iter().enumerate().take(5) {
        let place = p.site.map_or("left".to_string(), |s| format!("{:?}", lattice.coords(s)));
        println!("  particle {i} born at {:?}: {} jumps, now {place}", p.birth, p.jumps);
    }
    Ok(())
}
