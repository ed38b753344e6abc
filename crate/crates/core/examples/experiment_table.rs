//! Run a small phase scan and print the CSV table; the header line carries
//! the spec so the run can be reproduced from the file alone.

use arw::experiments::{run, spec_from_csv, ExperimentKind, ExperimentSpec};
use arw::model::{InitialState, JumpDistribution, SleepRate};

fn main() -> arw::Result<()> {
    let mut spec = ExperimentSpec::new(
        ExperimentKind::PhaseScan,
        JumpDistribution::directed_1d(),
        SleepRate::Finite(1.0),
        InitialState::poisson(0.5)?,
    );
    spec.sizes = vec![50, 100];
    spec.zetas = vec![0.3, 0.5, 0.7];
    spec.replicas = 50;
    spec.master_seed = 17;

    let table = run(&spec)?;
    let csv = table.to_csv();
    print!("{csv}");
    let again = run(&spec_from_csv(&csv)?)?;
    println!("rerun from header is identical: {}", again.to_csv() == csv);
    Ok(())
}
