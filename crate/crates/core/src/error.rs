use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    /// Exact analysis would have to visit more states than the configured cap.
    #[error("analysis infeasible: {what} has {size} states, cap is {cap}")]
    Infeasible { what: &'static str, size: String, cap: usize },

    #[error("schedule violation: player {player} at t={t} has effective rate {rate}, outside (0, 1]")]
    ScheduleViolation { player: usize, t: u64, rate: f64 },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("rate {0} outside (0, 1]")]
    RateOutOfRange(f64),

    #[error("unsupported noise: {0}")]
    UnsupportedNoise(String),

    #[error("invalid noise: {0}")]
    InvalidNoise(String),

    #[error("invalid transition matrix: {0}")]
    InvalidKernel(String),

    #[error("stationary solve failed: {0}")]
    Singular(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
