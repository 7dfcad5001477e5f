use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("path parameter s = {0} is outside [0, 1]")]
    OutOfDomain(f64),

    #[error("negative pseudo-velocity {0}")]
    NegativeVelocity(f64),

    #[error("joint {joint}: motor speed {speed} exceeds the characteristic's max speed {max}")]
    InfeasibleSpeed { joint: usize, speed: f64, max: f64 },

    #[error("path error at s = {s}: {reason}")]
    Path { s: f64, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("segment is not traversable: both endpoint pseudo-velocities are zero")]
    NonTraversable,

    #[error("planner reached a dead state at column {column}")]
    DeadState { column: usize },

    #[error("no feasible trajectory exists on this grid")]
    Infeasible,

    #[error("oracle refused: {states} states exceed the cap of {cap}")]
    OracleCap { states: usize, cap: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// True for errors that mean the planning instance itself has no solution.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            Error::DeadState { .. } | Error::Infeasible | Error::InfeasibleSpeed { .. }
        )
    }
}
