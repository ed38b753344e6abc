//! Scalar oracles: the two-colour urn and the Green function at the origin.

use arw::model::JumpDistribution;
use arw::procedures::{green_function_estimate, urn_run};
use arw::rng::derive_seed;
use arw::stats::Estimate;

fn main() -> arw::Result<()> {
    for r in [50, 100, 200] {
        let ks: Vec<f64> = (0..2000).map(|s| urn_run(r, 0.5, derive_seed(r, &[s])).map(|u| u.k_star as f64)).collect::<arw::Result<_>>()?;
        let e = Estimate::from_samples(&ks);
        println!("urn r = {r}: E k* = {:.1} +- {:.1}", e.mean, e.stderr);
    }
    for d in 1..=3 {
        let g = green_function_estimate(&JumpDistribution::symmetric(d), 5_000, 10_000, 1);
        let note = if g.not_transient { " (recurrent, grows with the horizon)" } else { "" };
        println!("symmetric d = {d}: G = {:.3} +- {:.3}{note}", g.estimate.mean, g.estimate.stderr);
    }
    let g = green_function_estimate(&JumpDistribution::directed_1d(), 10, 10, 1);
    println!("directed: G = {}", g.estimate.mean);
    Ok(())
}
