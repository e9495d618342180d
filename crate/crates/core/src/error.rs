//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by model construction and the analysis operations.
#[derive(Debug, Error)]
pub enum Error {
    /// A dense enumeration would exceed the configured cell budget.
    #[error("capacity exceeded: {required} cells required, budget is {budget}")]
    CapacityExceeded { required: u128, budget: u64 },

    /// The Φ-norm oracle candidate space exceeds its budget.
    #[error("oracle budget exceeded: {candidates} candidates, budget is {budget}")]
    OracleBudgetExceeded { candidates: u128, budget: u64 },

    /// Conditioning event has zero probability.
    #[error("conditioning on zero-probability prefix {prefix:?}")]
    ZeroProbabilityPrefix { prefix: Vec<usize> },

    /// Two objects that must share an index space do not.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A mass vector fails nonnegativity or normalization.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// A symbol label is not part of the alphabet.
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),

    /// A coordinate or level index is outside its valid range.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    /// The median bound is only valid above its threshold.
    #[error("median bound requires t > {threshold}, got t = {t}")]
    BelowMedianThreshold { t: f64, threshold: f64 },

    /// A tail estimate and a certificate use different conventions.
    #[error("convention mismatch: {0}")]
    ConventionMismatch(String),

    /// Any other invalid argument.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Whether this error is a capacity/budget exhaustion rather than a
    /// validation failure. The CLI maps these to exit code 2.
    pub fn is_capacity(&self) -> bool {
        matches!(
            self,
            Error::CapacityExceeded { .. } | Error::OracleBudgetExceeded { .. }
        )
    }

    /// Short machine-readable kind tag used in error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::CapacityExceeded { .. } => "capacity",
            Error::OracleBudgetExceeded { .. } => "oracle-budget",
            Error::ZeroProbabilityPrefix { .. } => "zero-probability-prefix",
            Error::ShapeMismatch(_) => "shape-mismatch",
            Error::InvalidDistribution(_) => "invalid-distribution",
            Error::UnknownSymbol(_) => "unknown-symbol",
            Error::IndexOutOfRange(_) => "index-out-of-range",
            Error::BelowMedianThreshold { .. } => "below-median-threshold",
            Error::ConventionMismatch(_) => "convention-mismatch",
            Error::InvalidParameter(_) => "invalid-parameter",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
