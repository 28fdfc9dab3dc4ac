use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration has dimension {got}, robot expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("invalid robot model: {0}")]
    InvalidRobot(String),

    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("probability invariant violated: {0}")]
    InvariantViolation(String),

    #[error("roadmap sampling failed: drew {attempts} samples, only {accepted} collision-free (budget exhausted)")]
    SamplingFailed { attempts: usize, accepted: usize },

    #[error("unsolvable instance: no goal configuration reaches any target hypothesis")]
    NoGoals,

    #[error("no solution: search frontier exhausted without a valid goal")]
    NoSolution,

    #[error("scene has {got} pose hypotheses in total, label capacity is {max}")]
    LabelCapacity { got: usize, max: usize },

    #[error("search exceeded the record cap of {0}")]
    SearchCap(usize),

    #[error("roadmap does not match scene: {0}")]
    SceneMismatch(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
