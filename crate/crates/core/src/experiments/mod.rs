//! Monte Carlo drivers for finite-volume fixation and activity proxies.
//!
//! Fixation is an infinite-volume statement, so every driver reports
//! statistics over an explicit grid of sizes and leaves the extrapolation to
//! the reader. Replicas that exhaust the toppling budget are counted as
//! censored and kept out of the estimates.

mod drivers;
mod spec;
mod table;

pub use drivers::{
    calibrate_kappa, driven_dissipative_trace, run, run_condition_b, run_condition_e, run_condition_u,
    run_driven_dissipative, run_fewstay_probe, run_phase_scan, run_ring, run_universality_check,
};
pub use spec::{ExperimentKind, ExperimentSpec};
pub use table::{spec_from_csv, ResultTable, Row, HEADER_PREFIX};
