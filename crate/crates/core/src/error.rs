use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("agent index {index} out of range for a lattice of {agents} agents")]
    AgentOutOfRange { index: usize, agents: usize },

    #[error("agent {from} is not a neighbor of agent {to}")]
    NotNeighbor { from: usize, to: usize },

    #[error("non-positive or non-finite price {price} at step {step}")]
    BadPrice { step: usize, price: f64 },

    #[error("invalid market tally: demand {demand} + supply {supply} exceeds {agents} agents")]
    BadTally {
        demand: usize,
        supply: usize,
        agents: usize,
    },

    #[error("empty sample")]
    EmptySample,

    #[error("sample contains a non-finite value")]
    NonFiniteSample,

    #[error("zero-variance series")]
    ZeroVariance,

    #[error("series of length {len} too short for max lag {max_lag}")]
    SeriesTooShort { len: usize, max_lag: usize },

    #[error("power-law fit needs at least {needed} positive points, found {found}")]
    TooFewFitPoints { needed: usize, found: usize },

    #[error("histogram needs at least 2 bins, got {0}")]
    TooFewBins(usize),

    #[error("historical data {path}: {reason}")]
    Data { path: PathBuf, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status for the CLI: 1 config, 2 data, 3 runtime.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Data { .. } => 2,
            _ => 3,
        }
    }
}
