use thiserror::Error;

use crate::engine::ToppleMode;

#[derive(Debug, Error)]
pub enum Error {
    #[error("operation undefined on an empty site")]
    DegenerateOperand,

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("illegal toppling at {site:?} in mode {mode:?}")]
    IllegalToppling { site: Vec<i64>, mode: ToppleMode },

    #[error("site index {0} is not a toppleable site of the domain")]
    OutOfDomain(usize),

    #[error("invalid volume: {0}")]
    InvalidVolume(String),

    #[error("procedure not applicable to this model: {0}")]
    WrongModel(String),

    #[error("site {site:?} holds {count} particles; input must be 0/1 per site")]
    NonBinaryInput { site: Vec<i64>, count: u32 },

    #[error("initial laws have different densities: {0} vs {1}")]
    DensityMismatch(f64, f64),

    #[error("toppling budget of {0} exhausted")]
    BudgetExceeded(u64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
