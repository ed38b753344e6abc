//! Exact invariant checks on random small instances, with and without a
//! deliberately broken engine.

use arw::engine::Fault;
use arw::validate::{random_instance, run_validate};

fn main() -> arw::Result<()> {
    println!("a sample instance:\n{}", random_instance(5));
    let clean = run_validate(300, 0, None)?;
    println!("clean engine: {} checks, {} skipped, violation: {}", clean.checks_run, clean.skipped, clean.violation.is_some());
    let broken = run_validate(300, 0, Some(Fault::SkipOdometerIncrement))?;
    if let Some(v) = broken.violation {
        println!("broken engine caught by the {} check on\n{}", v.check, v.instance);
    }
    Ok(())
}
