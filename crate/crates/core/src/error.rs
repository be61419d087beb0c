use thiserror::Error;

/// Errors raised by the engine. Numeric failures here always mean either a
/// bad input or a truncation window that was too small for the request.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error(
        "coefficient of z^{exponent} lies outside the known window (known below z^{precision})"
    )]
    WindowTooSmall { exponent: i64, precision: i64 },
    #[error("cannot antidifferentiate: nonzero z^-1 coefficient")]
    LogarithmicTerm,
    #[error("leading coefficient is not invertible")]
    NotInvertible,
    #[error("composition requires inner valuation >= 1, got {0}")]
    BadComposition(i64),
    #[error("log1p requires valuation >= 1, got {0}")]
    BadLogArgument(i64),
    #[error("invalid framing {0}: must be >= 1")]
    InvalidFraming(i64),
    #[error("W({g},{h}) is not representable: unstable correlator")]
    UnstableCorrelator { g: i64, h: i64 },
    #[error("psi peeling failed: {0}")]
    Peel(String),
    #[error("pole away from the ramification point: {0}")]
    StrayPole(String),
    #[error("log symbol survived a residue: {0}")]
    LogSurvived(String),
    #[error("consistency check failed: {0}")]
    Inconsistent(String),
    #[error("calibration failed: {0}")]
    Calibration(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("invalid genus {0}")]
    InvalidGenus(i64),
    #[error("cache: {0}")]
    Cache(String),
    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
