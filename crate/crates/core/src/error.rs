use std::path::PathBuf;

use crate::swing::MachineId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch in {what}: expected {expected}, got {got}")]
    Shape {
        what: String,
        expected: usize,
        got: usize,
    },

    #[error("simulation diverged after t = {last_time} s (non-finite state)")]
    SimulationDiverged { last_time: f64 },

    #[error("unknown machine id {0}")]
    UnknownMachine(MachineId),

    #[error("machine group is empty")]
    EmptyGroup,

    #[error("invalid group separation: {0}")]
    InvalidSeparation(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{path}: parse error at line {line}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("case validation failed: {0}")]
    Validation(String),

    #[error("unknown plot view '{0}'")]
    UnknownView(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn shape(what: impl Into<String>, expected: usize, got: usize) -> Self {
        Error::Shape {
            what: what.into(),
            expected,
            got,
        }
    }
}
