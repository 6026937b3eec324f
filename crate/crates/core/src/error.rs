use thiserror::Error;

/// Everything that can go wrong while building or evaluating stopping problems.
#[derive(Debug, Error)]
pub enum Error {
    #[error("distribution has no atoms")]
    EmptyDistribution,
    #[error("atom value {0} is not finite")]
    NonFiniteValue(f64),
    #[error("atom probability {0} is outside (0, 1]")]
    InvalidProbability(f64),
    #[error("probabilities sum to {sum}, expected 1")]
    ProbabilitySum { sum: f64 },
    #[error("instance has no distributions")]
    EmptyInstance,
    #[error("{0} must be at least 1")]
    ZeroLength(&'static str),
    #[error("step {k} is outside 1..={n}")]
    StepOutOfRange { k: usize, n: usize },
    #[error("OPT must be positive, got {0}")]
    NonPositiveOpt(f64),
    #[error("parameter {name} = {value} is outside {range}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("secretary prefix has length {got}, expected floor(n/e) = {expected}")]
    PrefixLength { expected: usize, got: usize },
    #[error("schedule has {got} thresholds but the instance has {expected} distributions")]
    ScheduleLength { expected: usize, got: usize },
    #[error("operation requires a {expected} instance")]
    WrongObjective { expected: &'static str },
    #[error("secretary rule needs at least 2 arrivals, got {0}")]
    TooFewArrivals(usize),
    #[error("adaptive schedules cannot be evaluated exactly")]
    AdaptiveSchedule,
    #[error("{what} needs {size} units of work, budget is {limit}")]
    BudgetExceeded { what: &'static str, size: f64, limit: f64 },
    #[error("bad schedule spec {spec:?}: {reason}")]
    ScheduleSpec { spec: String, reason: String },
    #[error("unknown claim {got:?}; valid ids: {valid}")]
    UnknownClaim { got: String, valid: String },
    #[error("parse error at {path} (line {line}, column {column}): {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid instance: {0}")]
    Validation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Budget errors are distinguished so callers can map them to their own exit code.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
