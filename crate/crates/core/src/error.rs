//! Error types shared across the crate.

use std::fmt;

/// Errors produced while building, validating, or evaluating a floorplan.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The input document is not valid JSON or is missing/mistyping a field.
    Schema(String),
    /// The floorplan violates a geometric invariant (overlap, out-of-outline,
    /// tiling gap, non-positive dimension).
    Geometry(String),
    /// A room type has no parameter rows in the active parameter table.
    Param(String),
    /// A scalar argument is outside the domain of a kernel or model.
    Domain(String),
    /// The adaptive quadrature could not reach the requested tolerance
    /// within the subdivision budget.
    Convergence {
        error_estimate: f64,
        tolerance: f64,
        intervals: usize,
    },
    /// Too few qualifying samples to form the requested empirical statistic.
    InsufficientSamples { needed: usize, got: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Schema(msg) => write!(f, "schema error: {msg}"),
            Error::Geometry(msg) => write!(f, "geometry error: {msg}"),
            Error::Param(msg) => write!(f, "parameter error: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Convergence {
                error_estimate,
                tolerance,
                intervals,
            } => write!(
                f,
                "quadrature did not converge: error estimate {error_estimate:.3e} \
                 exceeds tolerance {tolerance:.3e} after {intervals} intervals"
            ),
            Error::InsufficientSamples { needed, got } => {
                write!(f, "insufficient samples: needed {needed}, got {got}")
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
