use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },

    #[error("duration must be positive, got {0}")]
    NonPositiveDuration(f64),

    #[error("duration must be non-negative, got {0}")]
    NegativeDuration(f64),

    #[error("elapsed time {elapsed} exceeds step period {period}")]
    ElapsedBeyondPeriod { elapsed: f64, period: f64 },

    #[error("lambert W0 is undefined for x = {0} < -1/e")]
    LambertDomain(f64),

    #[error("cycle construction failed: {0}")]
    InvalidCycle(String),

    #[error("no admissible gain for controller {controller} at q0 = {q0}")]
    EmptyGainWindow { controller: u8, q0: f64 },

    #[error("controller {controller} cannot stabilize q0 = {q0} against q_c = {q_c} (opposite directions)")]
    DirectionMismatch { controller: u8, q0: f64, q_c: f64 },

    #[error("unknown controller id {0}")]
    UnknownController(u8),

    #[error("search direction is not a descent direction (slope {0})")]
    NotDescent(f64),

    #[error("backtracking did not satisfy sufficient decrease within {0} iterations")]
    BacktrackingCap(usize),

    #[error("objective undefined at T = {t} (must exceed T_0 = {t0})")]
    ObjectiveDomain { t: f64, t0: f64 },

    #[error("configuration unreachable: CoM is {distance} m from the stance foot, leg reach is {reach} m")]
    Unreachable { distance: f64, reach: f64 },

    #[error("CoM height must be positive, got {0}")]
    NonPositiveHeight(f64),

    #[error("unknown deviation case {0} (expected 1..=4)")]
    UnknownCase(u8),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("scenario field `{field}`: {reason}")]
    Scenario { field: String, reason: String },

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            field,
            reason: reason.into(),
        }
    }
}
