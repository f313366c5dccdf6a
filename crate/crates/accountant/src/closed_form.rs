//! Closed-form RDP bound for the sampled Gaussian mechanism.
//!
//! Under the hypotheses `q <= 1/5`, `sigma >= 4` and two order conditions,
//! the mechanism satisfies `(alpha, 2 q^2 alpha / sigma^2)`-RDP. The bound
//! comes from splitting `A_alpha` at `z0 = 1/2 + sigma^2 L` with
//! `L = ln(1 + 1/(q (alpha - 1)))` and bounding the two halves separately:
//! the left half unconditionally by `1 + q^2 alpha (alpha-1) (e^(1/sigma^2) - 1)`
//! and the right half, where the order conditions bite, by
//! `0.9 q^2 alpha (alpha-1) / sigma^2`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rdp::SgmParams;

/// Outcome of evaluating the closed-form bound at one `(q, sigma, alpha)`.
///
/// `eps_bound` is present exactly when all three condition flags hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    /// `2 q^2 alpha / sigma^2` when applicable, absent otherwise.
    pub eps_bound: Option<f64>,
    /// Range hypothesis `q <= 1/5 && sigma >= 4`.
    pub cond_range: bool,
    /// First order condition `alpha <= sigma^2 L / 2 - 2 ln sigma`.
    pub cond_alpha1: bool,
    /// Second order condition
    /// `alpha <= (sigma^2 L^2 / 2 - ln 5 - 2 ln sigma) / (L + ln(q alpha) + 1/(2 sigma^2))`.
    pub cond_alpha2: bool,
    /// `L = ln(1 + 1/(q (alpha - 1)))`, the log of the density-ratio bound `r0`.
    pub log_r0: f64,
    /// Split point `z0 = 1/2 + sigma^2 L`.
    pub z0: f64,
}

struct Conditions {
    log_r0: f64,
    z0: f64,
    cond_range: bool,
    cond_alpha1: bool,
    cond_alpha2: bool,
}

fn evaluate_conditions(q: f64, sigma: f64, alpha: f64) -> Conditions {
    let log_r0 = (1.0 + 1.0 / (q * (alpha - 1.0))).ln();
    let z0 = 0.5 + sigma * sigma * log_r0;
    let cond_range = q <= 0.2 && sigma >= 4.0;
    let rhs1 = 0.5 * sigma * sigma * log_r0 - 2.0 * sigma.ln();
    // Denominator L + ln(q alpha) + 1/(2 sigma^2), written through the
    // identity L + ln(q alpha) = ln(q alpha + alpha/(alpha - 1)) so the
    // q -> 0 limit stays finite. The argument exceeds 1, so the
    // denominator is strictly positive for every valid input.
    let denom = (q * alpha + alpha / (alpha - 1.0)).ln() + 1.0 / (2.0 * sigma * sigma);
    assert!(
        denom > 0.0,
        "internal error: non-positive condition denominator {denom} at q={q} sigma={sigma} alpha={alpha}"
    );
    let rhs2 = (0.5 * sigma * sigma * log_r0 * log_r0 - 5.0_f64.ln() - 2.0 * sigma.ln()) / denom;
    Conditions {
        log_r0,
        z0,
        cond_range,
        cond_alpha1: alpha <= rhs1,
        cond_alpha2: alpha <= rhs2,
    }
}

/// Evaluates the closed-form bound with full condition checking.
///
/// The conditions are checked by direct substitution of the candidate
/// `alpha`, with non-strict comparisons throughout.
pub fn closed_form_bound(params: &SgmParams, alpha: f64) -> Result<BoundReport> {
    if !alpha.is_finite() || alpha <= 1.0 {
        return Err(Error::InvalidOrder(alpha));
    }
    let q = params.q();
    let sigma = params.sigma();
    let c = evaluate_conditions(q, sigma, alpha);
    let eps_bound = (c.cond_range && c.cond_alpha1 && c.cond_alpha2)
        .then(|| 2.0 * q * q * alpha / (sigma * sigma));
    Ok(BoundReport {
        eps_bound,
        cond_range: c.cond_range,
        cond_alpha1: c.cond_alpha1,
        cond_alpha2: c.cond_alpha2,
        log_r0: c.log_r0,
        z0: c.z0,
    })
}

/// Unconditional bound on the left split `A_alpha^(1)`:
/// `1 + q^2 alpha (alpha - 1) (exp(1/sigma^2) - 1)`.
pub fn bound_a1(params: &SgmParams, alpha: f64) -> f64 {
    let q = params.q();
    let sigma = params.sigma();
    1.0 + q * q * alpha * (alpha - 1.0) * (1.0 / (sigma * sigma)).exp_m1()
}

/// Bound on the right split `A_alpha^(2)`:
/// `0.9 q^2 alpha (alpha - 1) / sigma^2` when the hypotheses
/// (`q <= 1/5`, `sigma >= 4` and both order conditions) hold; `None`
/// signals inapplicability, not failure.
pub fn bound_a2(params: &SgmParams, alpha: f64) -> Option<f64> {
    if !alpha.is_finite() || alpha <= 1.0 {
        return None;
    }
    let q = params.q();
    let sigma = params.sigma();
    let c = evaluate_conditions(q, sigma, alpha);
    (c.cond_range && c.cond_alpha1 && c.cond_alpha2)
        .then(|| 0.9 * q * q * alpha * (alpha - 1.0) / (sigma * sigma))
}
