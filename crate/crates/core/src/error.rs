use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot} is {value})")]
    NotPositiveDefinite { pivot: usize, value: String },

    #[error("ellipsoid is not centered at the origin")]
    NonCentered,

    #[error("basis vectors are linearly dependent")]
    RankDeficient,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("enumeration cap of {cap} points exceeded ({found} found so far)")]
    CapExceeded { cap: usize, found: usize },

    #[error("iteration budget of {0} exceeded")]
    IterationBudgetExceeded(usize),

    #[error("chord search could not bracket the body along a direction")]
    LineSearchFailure,

    #[error("empirical covariance is not positive definite")]
    DegenerateCovariance,

    #[error("restart budget of {0} exceeded without a certified M-ellipsoid")]
    RestartBudgetExceeded(usize),

    #[error("brute-force budget of {budget} candidates exceeded (needed {needed})")]
    BudgetExceeded { budget: usize, needed: u128 },

    #[error("missing analytic data: {0}")]
    MissingAnalyticData(String),

    #[error("body has no exact gauge; an exact oracle is required here")]
    InexactGauge,

    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short snake-case name of the error class.
    pub fn class(&self) -> &'static str {
        match self {
            Error::NotPositiveDefinite { .. } => "not_positive_definite",
            Error::NonCentered => "non_centered",
            Error::RankDeficient => "rank_deficient",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::IterationBudgetExceeded(_) => "iteration_budget_exceeded",
            Error::LineSearchFailure => "line_search_failure",
            Error::DegenerateCovariance => "degenerate_covariance",
            Error::RestartBudgetExceeded(_) => "restart_budget_exceeded",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::MissingAnalyticData(_) => "missing_analytic_data",
            Error::InexactGauge => "inexact_gauge",
            Error::InvalidBody(_) => "invalid_body",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Schema(_) => "schema",
            Error::Parse(_) => "parse",
        }
    }

    /// Stable process exit code per error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema(_) | Error::Parse(_) => 2,
            Error::InvalidArgument(_)
            | Error::DimensionMismatch { .. }
            | Error::InvalidBody(_)
            | Error::NonCentered
            | Error::RankDeficient
            | Error::NotPositiveDefinite { .. } => 3,
            Error::CapExceeded { .. } | Error::BudgetExceeded { .. } => 4,
            Error::IterationBudgetExceeded(_)
            | Error::RestartBudgetExceeded(_)
            | Error::LineSearchFailure
            | Error::DegenerateCovariance => 5,
            Error::MissingAnalyticData(_) | Error::InexactGauge => 6,
        }
    }
}
