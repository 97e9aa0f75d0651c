use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{name} = {value} is outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("grid is not sorted in increasing order at index {index}")]
    UnsortedGrid { index: usize },

    #[error("grid point t = {t} lies inside the excluded neighborhood |t| < {radius}")]
    PuncturedGrid { t: f64, radius: f64 },

    #[error("optimizer did not converge within {iterations} iterations (bracket width {width})")]
    NonConvergence { iterations: usize, width: f64 },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error(
        "instance too large for exact enumeration: {cases} cases exceeds the limit of {limit}"
    )]
    InstanceTooLarge { cases: u128, limit: u128 },

    #[error("denominator {value} of a closed form is not positive at p = {p}, s = {s}")]
    Degenerate { p: f64, s: f64, value: f64 },

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Rejects NaN and infinities.
pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            expected: "finite real",
        })
    }
}
