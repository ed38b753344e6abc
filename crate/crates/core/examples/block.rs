//! Feed particles into a single block and tabulate how many leave left,
//! leave right and stay asleep.

use arw::engine::DEFAULT_BUDGET;
use arw::field::InstructionField;
use arw::model::{sample_initial, InitialState, JumpDistribution, ModelParams, SiteState, SleepRate};
use arw::procedures::{block_functions, block_lattice};

fn main() -> arw::Result<()> {
    let k = 6;
    let lattice = block_lattice(k)?;
    let mut block = sample_initial(&InitialState::bernoulli(0.5)?, &lattice, 4)?;
    block.set_at(&[-i64::from(k)], SiteState::Empty)?;
    block.set_at(&[i64::from(k)], SiteState::Empty)?;
    let field = InstructionField::new(9, ModelParams::new(SleepRate::Finite(0.5), JumpDistribution::symmetric(1)));

    let f = block_functions(&block, &field, 60, DEFAULT_BUDGET)?;
    println!("K = {k}, {} particles initially in the block", f.initial);
    println!("{:>4} {:>4} {:>4} {:>4} {:>4}", "m", "L", "R", "S", "T");
    for m in (0..=60).step_by(10) {
        println!("{m:>4} {:>4} {:>4} {:>4} {:>4}", f.l[m], f.r[m], f.s[m], f.t[m]);
    }
    match f.check() {
        Ok(()) => println!("sum identity and bounded increase hold"),
        Err(e) => println!("violation: {e}"),
    }
    Ok(())
}
