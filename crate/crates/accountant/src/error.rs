//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by accounting, calibration and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Sampling rate outside `[0, 1]` (or not finite).
    #[error("sampling rate q must lie in [0, 1], got {0}")]
    InvalidSamplingRate(f64),

    /// Noise scale that is zero, negative or not finite.
    #[error("noise scale sigma must be positive and finite, got {0}")]
    InvalidSigma(f64),

    /// Renyi order at or below 1, where the divergence ratio formula breaks down.
    #[error("Renyi order alpha must be a finite value > 1, got {0}")]
    InvalidOrder(f64),

    /// `delta` outside the open interval `(0, 1)`.
    #[error("delta must lie in (0, 1), got {0}")]
    InvalidDelta(f64),

    /// Target epsilon that is zero, negative or not finite.
    #[error("target epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),

    /// `log_sub_exp(a, b)` called with `a < b`. This signals a sign
    /// bookkeeping bug in the caller, not a recoverable condition.
    #[error("log_sub_exp requires a >= b, got a = {a}, b = {b}")]
    NegativeLogDifference { a: f64, b: f64 },

    /// The series for fractional orders did not meet its stopping rule
    /// within the iteration cap.
    #[error(
        "series did not converge within {max_terms} terms (q = {q}, sigma = {sigma}, alpha = {alpha})"
    )]
    NonConvergence {
        q: f64,
        sigma: f64,
        alpha: f64,
        max_terms: usize,
    },

    /// Adaptive quadrature exhausted its refinement budget.
    #[error("quadrature error estimate {est_error} exceeds requested tolerance {requested}")]
    ToleranceNotMet { requested: f64, est_error: f64 },

    /// No noise scale within the search bracket meets the privacy target.
    #[error("no sigma in [{sigma_lo}, {sigma_hi}] meets the target budget")]
    Infeasible { sigma_lo: f64, sigma_hi: f64 },

    /// A curve violating the ordering/positivity invariants of an RDP curve.
    #[error("invalid RDP curve: {0}")]
    InvalidCurve(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
