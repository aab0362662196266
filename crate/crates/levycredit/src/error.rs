//! Crate-wide error type.

use crate::calibration::CalibrationResult;

/// Errors produced by the pricing, calibration and I/O layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument left the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A special-function result exceeds the double-precision range.
    #[error("overflow: {0}")]
    Overflow(String),

    /// A gamma-function argument of the series expansion lies within
    /// `pole_epsilon` of a nonpositive integer.
    #[error("gamma argument {argument} within {epsilon} of a nonpositive integer")]
    PoleProximity { argument: f64, epsilon: f64 },

    /// Adaptive quadrature could not reach the requested tolerance
    /// within its subdivision budget.
    #[error("quadrature did not converge: requested {requested}, reached {reached}")]
    QuadratureNonConvergence { requested: f64, reached: f64 },

    /// Equity inversion found no asset value reproducing the observed price.
    #[error("no asset value reproduces the observed equity {0}")]
    NoSolution(f64),

    /// Sample excess kurtosis is nonpositive, incompatible with a jump
    /// model parametrization.
    #[error("nonpositive excess kurtosis {0} for a jump model")]
    NonPositiveKurtosis(f64),

    /// A return series with zero variance cannot be standardized.
    #[error("degenerate series: sample variance is zero")]
    DegenerateSeries,

    /// The calibration fixed point did not meet the tolerance within
    /// the iteration budget. The partial result carries the trace.
    #[error("calibration did not converge in {} iterations", .0.iterations)]
    NotConverged(Box<CalibrationResult>),

    /// Malformed input file.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A price in the input series is zero or negative.
    #[error("nonpositive price at line {line}")]
    NonPositivePrice { line: usize },

    /// Observation dates are not strictly increasing.
    #[error("dates not strictly increasing: {0}")]
    NonMonotoneDates(String),

    /// Too few observations for calibration.
    #[error("series too short: {got} observations, need at least {need}")]
    TooShort { got: usize, need: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
