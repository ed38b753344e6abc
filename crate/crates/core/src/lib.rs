//! Simulation lab for activated random walks on `Z^d`: configurations and
//! instruction fields, an Abelian site-wise toppling engine, the classical
//! toppling procedures, continuous-time dynamics and experiment drivers.

pub mod cli;
pub mod dynamics;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod field;
pub mod model;
pub mod procedures;
pub mod rng;
pub mod stats;
pub mod trace;
pub mod validate;

pub use error::{Error, Result};
