//! Composition, conversion to (eps, delta)-DP, and noise calibration.
//!
//! RDP composes additively per order, so running the mechanism `steps`
//! times scales every curve point linearly. A composed curve converts to
//! an (eps, delta) guarantee through
//! `eps = min_alpha (eps(alpha) + ln(1/delta) / (alpha - 1))`,
//! and calibration inverts the whole pipeline by bisecting on sigma,
//! which is valid because eps is non-increasing in sigma.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rdp::{RdpCurve, SgmParams};

/// An (eps, delta) privacy budget to calibrate against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DpTarget {
    eps: f64,
    delta: f64,
}

impl DpTarget {
    /// Validates `eps > 0` and `delta` in the open interval `(0, 1)`.
    pub fn new(eps: f64, delta: f64) -> Result<Self> {
        if !eps.is_finite() || eps <= 0.0 {
            return Err(Error::InvalidEpsilon(eps));
        }
        if !delta.is_finite() || delta <= 0.0 || delta >= 1.0 {
            return Err(Error::InvalidDelta(delta));
        }
        Ok(DpTarget { eps, delta })
    }

    /// Target epsilon.
    pub fn eps(self) -> f64 {
        self.eps
    }

    /// Target delta.
    pub fn delta(self) -> f64 {
        self.delta
    }
}

/// An (eps, delta) guarantee derived from an RDP curve, together with the
/// order that minimized the conversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DpGuarantee {
    pub eps: f64,
    pub delta: f64,
    pub best_order: f64,
}

/// Scales a curve to `steps` sequential applications of the mechanism:
/// identical orders, every eps multiplied by `steps`, step count updated
/// multiplicatively. `steps` must be at least 1.
pub fn compose(curve: &RdpCurve, steps: u64) -> RdpCurve {
    assert!(steps >= 1, "composition requires at least one step");
    curve.scaled(steps)
}

/// Converts an RDP curve to an (eps, delta) guarantee by minimizing
/// `eps(alpha) + ln(1/delta) / (alpha - 1)` over the curve's orders.
/// Ties go to the smallest order.
pub fn to_dp(curve: &RdpCurve, delta: f64) -> Result<DpGuarantee> {
    if !delta.is_finite() || delta <= 0.0 || delta >= 1.0 {
        return Err(Error::InvalidDelta(delta));
    }
    let ln_inv_delta = -delta.ln();
    let mut best_eps = f64::INFINITY;
    let mut best_order = f64::NAN;
    for p in curve.points() {
        let candidate = p.eps + ln_inv_delta / (p.order - 1.0);
        if candidate < best_eps {
            best_eps = candidate;
            best_order = p.order;
        }
    }
    Ok(DpGuarantee {
        eps: best_eps,
        delta,
        best_order,
    })
}

/// The order grid used when the caller does not supply one: dense near the
/// small orders where subsampled mechanisms optimize, sparse above.
pub fn default_orders() -> Vec<f64> {
    let mut orders: Vec<f64> = vec![1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 3.0, 3.5, 4.0, 4.5];
    orders.extend((5..=64).map(f64::from));
    orders.push(128.0);
    orders.push(256.0);
    orders
}

const SIGMA_LO: f64 = 1e-2;
const SIGMA_HI: f64 = 1e4;
const SIGMA_MAX: f64 = 1e8;
const BISECT_REL_WIDTH: f64 = 1e-4;

/// Smallest sigma in `[1e-2, 1e4]` (bracket expanded up to `1e8` if
/// needed) whose composed, converted guarantee meets `target`, found by
/// bisection to relative width 1e-4. Relies on eps being non-increasing
/// in sigma. `q = 0` meets any target, so the bracket floor is returned.
pub fn calibrate_sigma(q: f64, steps: u64, target: &DpTarget, orders: &[f64]) -> Result<f64> {
    if !q.is_finite() || !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidSamplingRate(q));
    }
    if q == 0.0 {
        return Ok(SIGMA_LO);
    }

    let achieved = |sigma: f64| -> Result<f64> {
        let params = SgmParams::new(q, sigma)?;
        let curve = RdpCurve::compute(&params, orders)?;
        Ok(to_dp(&compose(&curve, steps), target.delta())?.eps)
    };

    if achieved(SIGMA_LO)? <= target.eps() {
        return Ok(SIGMA_LO);
    }
    let mut lo = SIGMA_LO;
    let mut hi = SIGMA_HI;
    while achieved(hi)? > target.eps() {
        if hi >= SIGMA_MAX {
            return Err(Error::Infeasible {
                sigma_lo: SIGMA_LO,
                sigma_hi: SIGMA_MAX,
            });
        }
        lo = hi;
        hi = (hi * 10.0).min(SIGMA_MAX);
    }
    while hi - lo > BISECT_REL_WIDTH * hi {
        let mid = 0.5 * (lo + hi);
        if achieved(mid)? <= target.eps() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
