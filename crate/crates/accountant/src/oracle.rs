//! Independent high-precision verification of the accountant.
//!
//! The series accountant is checked against direct adaptive quadrature of
//! the defining integrals
//! `A_alpha = E_{z ~ mu0} [(mu(z)/mu0(z))^alpha]` and
//! `B_alpha = E_{z ~ mu} [(mu0(z)/mu(z))^alpha]`,
//! against a seeded Monte Carlo estimate, and against pointwise
//! evaluations of the integrand inequality behind `A_alpha >= B_alpha`.
//! Nothing in this module shares a code path with the series computation.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::logmath::log_add_exp;
use crate::rdp::SgmParams;

/// Result of one adaptive quadrature run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    /// The integral (`A_alpha` or `B_alpha`).
    pub value: f64,
    /// Absolute error estimate accumulated over accepted panels.
    pub est_error: f64,
    /// Number of integrand evaluations.
    pub evaluations: u64,
}

// 15-point Kronrod extension of the 7-point Gauss rule (positive half;
// the Gauss nodes are the odd-indexed abscissae plus the center).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One Gauss-Kronrod panel over `[a, b]` of a log-domain integrand:
/// the 15 node values are rescaled by their maximum log before
/// exponentiation so panels deep in the tails never overflow.
fn gk15_log(f_log: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let mut nodes = [0.0_f64; 15];
    let mut lf = [f64::NEG_INFINITY; 15];
    let mut idx = 0;
    for (i, &x) in XGK.iter().enumerate() {
        if i == 7 {
            nodes[idx] = center;
            idx += 1;
        } else {
            nodes[idx] = center - half * x;
            nodes[idx + 1] = center + half * x;
            idx += 2;
        }
    }
    let mut max_log = f64::NEG_INFINITY;
    for (i, &z) in nodes.iter().enumerate() {
        lf[i] = f_log(z);
        max_log = max_log.max(lf[i]);
    }
    if max_log == f64::NEG_INFINITY {
        return (0.0, 0.0);
    }

    let mut kronrod = 0.0_f64;
    let mut gauss = 0.0_f64;
    let mut idx = 0;
    for (i, &wk) in WGK.iter().enumerate() {
        if i == 7 {
            let fv = (lf[idx] - max_log).exp();
            kronrod += wk * fv;
            gauss += WG[3] * fv;
            idx += 1;
        } else {
            let fv = (lf[idx] - max_log).exp() + (lf[idx + 1] - max_log).exp();
            kronrod += wk * fv;
            if i % 2 == 1 {
                gauss += WG[i / 2] * fv;
            }
            idx += 2;
        }
    }

    let log_scale = max_log + half.ln();
    let value = (log_scale + kronrod.ln()).exp();
    let diff = (kronrod - gauss).abs();
    let err = if diff == 0.0 {
        0.0
    } else {
        (log_scale + diff.ln()).exp()
    };
    (value, err)
}

const MAX_DEPTH: u32 = 60;

struct Refinement {
    value: f64,
    err: f64,
    evals: u64,
}

fn refine(
    f_log: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    budget_per_len: f64,
    depth: u32,
    acc: &mut Refinement,
) {
    let (v, e) = gk15_log(f_log, a, b);
    acc.evals += 15;
    if e <= budget_per_len * (b - a) || depth >= MAX_DEPTH {
        acc.value += v;
        acc.err += e;
    } else {
        let mid = 0.5 * (a + b);
        refine(f_log, a, mid, budget_per_len, depth + 1, acc);
        refine(f_log, mid, b, budget_per_len, depth + 1, acc);
    }
}

/// Adaptive quadrature of a non-negative log-domain integrand over
/// `[lo, hi]` to relative tolerance `tol`.
fn adaptive_log_quad(
    f_log: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    sigma: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    debug_assert!(tol > 0.0 && tol < 0.1, "tolerance must be in (0, 0.1)");
    let panels = (((hi - lo) / sigma).ceil() as usize).clamp(8, 512);
    let width = (hi - lo) / panels as f64;

    // Coarse estimate to turn the relative tolerance into an absolute
    // per-length budget; one retry with the refined value if it was off.
    let mut evals = 0u64;
    let mut estimate = 0.0_f64;
    for i in 0..panels {
        let a = lo + i as f64 * width;
        let (v, _) = gk15_log(f_log, a, a + width);
        estimate += v;
        evals += 15;
    }

    for _ in 0..2 {
        let mut acc = Refinement {
            value: 0.0,
            err: 0.0,
            evals,
        };
        let budget_per_len = 0.5 * tol * estimate / (hi - lo);
        for i in 0..panels {
            let a = lo + i as f64 * width;
            refine(f_log, a, a + width, budget_per_len, 0, &mut acc);
        }
        if acc.err <= tol * acc.value {
            return Ok(QuadratureResult {
                value: acc.value,
                est_error: acc.err,
                evaluations: acc.evals,
            });
        }
        estimate = acc.value;
        evals = acc.evals;
        if estimate == 0.0 {
            break;
        }
    }
    Err(Error::ToleranceNotMet {
        requested: tol,
        est_error: f64::NAN,
    })
}

/// Truncation width in noise standard deviations past the outermost
/// Gaussian component. `sqrt(2 ln(4/tol))` alone would leave a discarded
/// tail of order `tol`, the same size as the panel-error budget; the
/// extra margin pushes it to `~tol * e^-30` so the reported error
/// estimate is governed by the panel rule alone, which matters when the
/// integral is `1 + epsilon` and the caller reads `ln(value)`.
fn truncation_width(alpha: f64, sigma: f64, tol: f64) -> f64 {
    (2.0 * (4.0 / tol).ln()).sqrt() + alpha / sigma + 4.0
}

/// `A_alpha` by direct adaptive quadrature of
/// `integral mu0(z) ((1-q) + q mu1(z)/mu0(z))^alpha dz`.
///
/// The integrand is evaluated in log space through `log_add_exp` and
/// exponentiated per panel. The degenerate sampling rates have exact
/// analytic values (`1` at `q = 0`, `exp((alpha^2-alpha)/(2 sigma^2))` at
/// `q = 1`) and skip quadrature entirely.
pub fn quad_a(params: &SgmParams, alpha: f64, tol: f64) -> Result<QuadratureResult> {
    if !alpha.is_finite() || alpha <= 1.0 {
        return Err(Error::InvalidOrder(alpha));
    }
    let q = params.q();
    let sigma = params.sigma();
    if let Some(exact) = analytic_endpoint(q, sigma, alpha) {
        return Ok(exact);
    }

    let two_sigma_sq = 2.0 * sigma * sigma;
    let ln_norm = -(sigma * (2.0 * PI).sqrt()).ln();
    let ln_q = q.ln();
    let ln_1q = (-q).ln_1p();
    let f_log = move |z: f64| {
        ln_norm - z * z / two_sigma_sq
            + alpha * log_add_exp(ln_1q, ln_q + (2.0 * z - 1.0) / two_sigma_sq)
    };

    let k = truncation_width(alpha, sigma, tol);
    let lo = 0.0_f64.min(alpha) - sigma * k;
    let hi = 1.0_f64.max(alpha) + sigma * k;
    adaptive_log_quad(&f_log, lo, hi, sigma, tol)
}

/// `B_alpha` by the same adaptive scheme applied to
/// `integral mu(z) (mu0(z)/mu(z))^alpha dz = integral mu0^alpha mu^(1-alpha) dz`.
pub fn quad_b(params: &SgmParams, alpha: f64, tol: f64) -> Result<QuadratureResult> {
    if !alpha.is_finite() || alpha <= 1.0 {
        return Err(Error::InvalidOrder(alpha));
    }
    let q = params.q();
    let sigma = params.sigma();
    if let Some(exact) = analytic_endpoint(q, sigma, alpha) {
        return Ok(exact);
    }

    let two_sigma_sq = 2.0 * sigma * sigma;
    let ln_norm = -(sigma * (2.0 * PI).sqrt()).ln();
    let ln_q = q.ln();
    let ln_1q = (-q).ln_1p();
    let f_log = move |z: f64| {
        ln_norm - z * z / two_sigma_sq
            + (1.0 - alpha) * log_add_exp(ln_1q, ln_q + (2.0 * z - 1.0) / two_sigma_sq)
    };

    // The right-weighted component of the B integrand is centered at
    // 1 - alpha, so the domain extends left of the A domain.
    let k = truncation_width(alpha, sigma, tol);
    let lo = 0.0_f64.min(1.0 - alpha) - sigma * k;
    let hi = 1.0_f64.max(alpha) + sigma * k;
    adaptive_log_quad(&f_log, lo, hi, sigma, tol)
}

/// At `q = 0` both moments are 1; at `q = 1` the mixture collapses to a
/// unit-shifted Gaussian and both equal `exp((alpha^2 - alpha)/(2 sigma^2))`.
fn analytic_endpoint(q: f64, sigma: f64, alpha: f64) -> Option<QuadratureResult> {
    let value = if q == 0.0 {
        1.0
    } else if q == 1.0 {
        ((alpha * alpha - alpha) / (2.0 * sigma * sigma)).exp()
    } else {
        return None;
    };
    Some(QuadratureResult {
        value,
        est_error: 0.0,
        evaluations: 0,
    })
}

/// Seeded Monte Carlo estimate of `A_alpha`: draws `z ~ N(0, sigma^2)`
/// from a ChaCha stream and averages
/// `((1-q) + q exp((2z - 1)/(2 sigma^2)))^alpha`.
/// Returns `(mean, standard error)`; identical inputs give bit-identical
/// output. Requires `samples >= 10_000`.
pub fn mc_estimate_a(params: &SgmParams, alpha: f64, samples: u64, seed: u64) -> (f64, f64) {
    assert!(samples >= 10_000, "need at least 1e4 samples");
    let q = params.q();
    let sigma = params.sigma();
    let two_sigma_sq = 2.0 * sigma * sigma;
    let ln_q = q.ln();
    let ln_1q = (-q).ln_1p();

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut mean = 0.0_f64;
    let mut m2 = 0.0_f64;
    for n in 1..=samples {
        let g: f64 = StandardNormal.sample(&mut rng);
        let z = sigma * g;
        let value = (alpha * log_add_exp(ln_1q, ln_q + (2.0 * z - 1.0) / two_sigma_sq)).exp();
        let delta = value - mean;
        mean += delta / n as f64;
        m2 += delta * (value - mean);
    }
    let variance = m2 / (samples - 1) as f64;
    (mean, (variance / samples as f64).sqrt())
}

/// Pointwise integrand inequality behind `A_alpha >= B_alpha`:
/// `v (P_q/v)^alpha + u (Q_q/u)^alpha >= P_q (v/P_q)^alpha + Q_q (u/Q_q)^alpha`
/// with `P_q = (1-q)u + qv` and `Q_q = (1-q)v + qu`.
///
/// Both sides are compared in log space (the powers overflow `f64` for
/// large `alpha` and extreme ratios), allowing `1e-12` rounding slack.
pub fn check_pointwise_lemma(u: f64, v: f64, q: f64, alpha: f64) -> bool {
    assert!(u > 0.0 && v > 0.0, "u, v must be positive");
    assert!((0.0..=1.0).contains(&q), "q must lie in [0, 1]");
    assert!(alpha > 1.0, "alpha must exceed 1");
    let p_q = (1.0 - q) * u + q * v;
    let q_q = (1.0 - q) * v + q * u;
    let (ln_u, ln_v) = (u.ln(), v.ln());
    let (ln_pq, ln_qq) = (p_q.ln(), q_q.ln());
    let ln_lhs = log_add_exp(ln_v + alpha * (ln_pq - ln_v), ln_u + alpha * (ln_qq - ln_u));
    let ln_rhs = log_add_exp(
        ln_pq + alpha * (ln_v - ln_pq),
        ln_qq + alpha * (ln_u - ln_qq),
    );
    ln_lhs >= ln_rhs - 1e-12
}
