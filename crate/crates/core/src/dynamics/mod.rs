//! Continuous-time and particle-wise constructions on finite domains.

pub mod ct;
pub mod exits;
pub mod particlewise;
pub mod transport;

pub use ct::{ct_run, CtRun, RunStatus};
pub use exits::{exit_counts, ExitCounts};
pub use particlewise::{particlewise_run, project, ExitRecord, LabeledSystem, Particle, PwRun};
pub use transport::{origin_transport, Transport};
