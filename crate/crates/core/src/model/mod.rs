//! Configurations, lattices, jump kernels and initial laws.

mod config;
mod initial;
mod jumps;
mod lattice;
mod state;

pub use config::{Configuration, Volume};
pub(crate) use config::parse_header;
pub use initial::{sample_initial, InitialState};
pub use jumps::{JumpDistribution, ModelParams, SleepRate};
pub use lattice::{Boundary, Direction, Lattice, Shape, Step};
pub(crate) use state::code;
pub use state::SiteState;
