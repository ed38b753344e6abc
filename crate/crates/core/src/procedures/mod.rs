//! Named toppling procedures and auxiliary stochastic processes.

pub mod block;
pub mod green;
pub mod killed_walk;
pub mod safe_zone;
pub mod sweep;
pub mod trap;
pub mod urn;

pub use block::{block_functions, block_lattice, BlockFunctions};
pub use green::{green_function_estimate, GreenEstimate};
pub use killed_walk::{killed_walk_prob, KilledWalkEstimate};
pub use safe_zone::{safe_zone_drive, SafeZoneResult};
pub use sweep::{directed_sweep, SweepResult};
pub use trap::{trap_explore, TrapFailure, TrapOptions, TrapResult, TrapStatus};
pub use urn::{urn_run, UrnRun};
