use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter record violated one of its invariants.
    InvalidParameter(&'static str),
    /// An argument outside the domain an operation supports.
    InvalidArgument(&'static str),
    /// The hypergeometric series did not converge within its term budget.
    SeriesNonConvergence { a: f64, b: f64, c: f64, z: f64 },
    /// Adaptive quadrature exhausted its subdivision budget.
    QuadratureNonConvergence { lower: f64, upper: f64, error: f64 },
}

impl Error {
    /// True for failures of the numerical machinery, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::SeriesNonConvergence { .. } | Error::QuadratureNonConvergence { .. })
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::SeriesNonConvergence { a, b, c, z } => {
                write!(f, "hypergeometric series 2F1({a}, {b}; {c}; {z}) did not converge")
            }
            Error::QuadratureNonConvergence { lower, upper, error } => {
                write!(f, "quadrature on [{lower}, {upper}] did not converge (error estimate {error:e})")
            }
        }
    }
}

impl core::error::Error for Error {}
