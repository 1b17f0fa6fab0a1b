use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("non-finite value produced by {0}")]
    NonFinite(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("cube {cube:?} carries spectral mass but has no coefficient")]
    UncoveredCube { cube: Vec<i64> },

    #[error("schedule entry {entry} violates {constraint}")]
    ScheduleConstraint { entry: String, constraint: String },

    #[error("exponent pair is not admissible: {0}")]
    NotAdmissible(String),

    #[error("empty trajectory")]
    EmptyTrajectory,

    #[error("blow-up detected at t = {time}: {reason}")]
    BlowUp { time: f64, reason: String },

    #[error("degenerate sample: {0}")]
    Degenerate(String),

    #[error("snapshot format: {0}")]
    Snapshot(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
