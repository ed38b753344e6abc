//! Mass sent from and received at the origin during a stabilization on a torus.

use crate::engine::{Engine, Status, Strategy, ToppleMode};
use crate::error::{Error, Result};
use crate::field::{Instruction, InstructionField};
use crate::model::{Configuration, Shape, Step, Volume};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transport {
    /// Jumps out of the origin.
    pub sent: u64,
    /// Jumps from other sites landing on the origin.
    pub received: u64,
    pub status: Status,
}

pub fn origin_transport(cfg: &Configuration, field: &InstructionField, budget: u64) -> Result<Transport> {
    let lattice = cfg.lattice().clone();
    if lattice.shape() != Shape::Torus {
        return Err(Error::WrongModel("mass transport is measured on a torus".into()));
    }
    let origin = lattice.origin().expect("torus contains the origin");
    let mut e = Engine::new(cfg.clone(), field.clone())?.with_trace();
    let status = e.stabilize(&Volume::whole(&lattice), Strategy::QueueFifo, ToppleMode::Legal, budget)?;
    let mut received = 0;
    for ev in e.take_trace() {
        if let Instruction::Jump(d) = ev.instruction {
            let x = lattice.index_of(&ev.site).expect("site");
            if x != origin && lattice.step(x, d) == Step::Site(origin) {
                received += 1;
            }
        }
    }
    Ok(Transport { sent: e.odometer().jump_odometer()[origin], received, status })
}
