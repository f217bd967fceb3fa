//! Single-snapshot gridless 2D direction-of-arrival estimation for uniform
//! circular arrays.
//!
//! The pipeline maps the physical UCA manifold onto a small virtual uniform
//! rectangular array through a jointly optimized transformation matrix, fits
//! an atomic-norm surrogate to the transformed snapshot with an inexact
//! augmented Lagrangian solver, and reads paired (azimuth, elevation)
//! estimates out of the converged low-rank factor with a 2D shift-invariance
//! procedure. Reference estimators (2D-MUSIC, grid-based 2D-Lasso) and the
//! deterministic single-snapshot Cramér-Rao bound are included, together
//! with a Monte Carlo harness that scores everything by RMS angular error.

pub mod array;
pub mod baselines;
pub mod config;
pub mod experiments;
pub mod manifold;
pub mod metrics;
pub mod mlt;
pub mod plot;
pub mod recovery;
pub mod solver;

use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("angle out of domain: {0}")]
    AngleDomain(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("infeasible spatial frequency: u^2 + v^2 = {0} > 1")]
    InfeasibleFrequency(f64),
    #[error("shift-invariance system is rank deficient: {0}")]
    ShiftInvariance(String),
    #[error("degenerate source geometry: {0}")]
    DegenerateGeometry(String),
    #[error("numerical failure at outer iteration {iter}: {what}")]
    NumericalFailure { iter: usize, what: String },
    #[error("linear algebra error: {0}")]
    Linalg(#[from] ndarray_linalg::error::LinalgError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    /// Process exit code convention: 2 for config/format problems,
    /// 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::AngleDomain(_)
            | Error::DimensionMismatch(_)
            | Error::InvalidParameter(_)
            | Error::Io { .. }
            | Error::Format(_) => 2,
            Error::InfeasibleFrequency(_)
            | Error::ShiftInvariance(_)
            | Error::DegenerateGeometry(_)
            | Error::NumericalFailure { .. }
            | Error::Linalg(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
