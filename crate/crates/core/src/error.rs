use thiserror::Error;

/// Errors produced by the simulation and analysis library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter `{key}` out of range: {reason}")]
    Range { key: String, reason: String },

    #[error("unknown parameter `{0}`")]
    UnknownKey(String),

    #[error("cannot parse value `{value}` for `{key}`")]
    Parse { key: String, value: String },

    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("empty population")]
    EmptyPopulation,

    #[error("population too small")]
    PopulationTooSmall,

    #[error("trajectory too short: {windows} post-warmup windows, need at least {needed}")]
    TrajectoryTooShort { windows: usize, needed: usize },

    #[error("{0}")]
    Precondition(String),

    #[error("input is not sorted: {0}")]
    Unsorted(String),

    #[error("editor `{0}` has contradictory bot flags")]
    InconsistentBotFlag(String),

    #[error("infeasible synthetic schedule: {0}")]
    InfeasibleSchedule(String),

    #[error("invalid synthetic spec: {0}")]
    Spec(String),

    #[error("missing grid cells: {0}")]
    MissingCells(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn range(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Range {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad input (as opposed to runtime failure).
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}
