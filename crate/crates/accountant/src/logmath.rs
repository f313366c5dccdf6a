//! Signed log-space arithmetic and log-domain special functions.
//!
//! Every series in this crate is summed in the log domain so that factors
//! like `exp((k^2 - k) / (2 sigma^2))` never overflow an `f64`. A real
//! number is carried as a sign together with the natural log of its
//! magnitude ([`SignedLog`]); sums of mixed-sign sequences are accumulated
//! as two separate positive log-sums ([`SignedLogSum`]) and combined once
//! at the end, so cancellation happens in a single well-conditioned
//! subtraction.

use crate::error::{Error, Result};

/// ln(2), the log-magnitude of the sum of two equal terms.
pub const LN_2: f64 = std::f64::consts::LN_2;

const LN_SQRT_PI: f64 = 0.572_364_942_924_700_1; // ln(sqrt(pi))

/// Returns `ln(e^a + e^b)` without overflow for arguments up to ~700.
///
/// `-inf` acts as the identity; the result is never below `max(a, b)`.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::INFINITY {
        return f64::INFINITY;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Returns `ln(e^a - e^b)` for `a >= b`; `-inf` when the terms cancel exactly.
///
/// A caller passing `a < b` has lost track of a sign somewhere, so that is
/// reported as [`Error::NegativeLogDifference`] rather than silently
/// producing a NaN.
#[inline]
pub fn log_sub_exp(a: f64, b: f64) -> Result<f64> {
    if a < b || a.is_nan() || b.is_nan() {
        return Err(Error::NegativeLogDifference { a, b });
    }
    if a == b {
        // Covers exact cancellation and the (-inf, -inf) case.
        return Ok(f64::NEG_INFINITY);
    }
    Ok(a + (-((b - a).exp())).ln_1p())
}

/// A real number represented as a sign and the natural log of its magnitude.
///
/// Zero is `(sign = 0, logmag = -inf)`; the two fields are kept consistent
/// by every constructor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    sign: i8,
    logmag: f64,
}

impl SignedLog {
    /// The zero value.
    pub const ZERO: SignedLog = SignedLog {
        sign: 0,
        logmag: f64::NEG_INFINITY,
    };

    /// Builds a value from an explicit sign and log-magnitude, normalizing
    /// the zero representation.
    pub fn new(sign: i8, logmag: f64) -> Self {
        debug_assert!((-1..=1).contains(&sign), "sign must be -1, 0 or 1");
        if sign == 0 || logmag == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            SignedLog { sign, logmag }
        }
    }

    /// Converts a plain `f64` into sign/log-magnitude form.
    pub fn from_real(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else if x > 0.0 {
            SignedLog {
                sign: 1,
                logmag: x.ln(),
            }
        } else {
            SignedLog {
                sign: -1,
                logmag: (-x).ln(),
            }
        }
    }

    /// Converts back to a plain `f64` (may overflow to +/-inf for
    /// log-magnitudes above ~709.8).
    pub fn to_real(self) -> f64 {
        match self.sign {
            0 => 0.0,
            1 => self.logmag.exp(),
            _ => -self.logmag.exp(),
        }
    }

    /// Sign of the value: -1, 0 or +1.
    pub fn sign(self) -> i8 {
        self.sign
    }

    /// Natural log of the magnitude; `-inf` for zero.
    pub fn logmag(self) -> f64 {
        self.logmag
    }

    /// Whether the value is exactly zero.
    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    /// Multiplies by a plain positive factor given in log space.
    pub fn scale_log(self, log_factor: f64) -> Self {
        Self::new(self.sign, self.logmag + log_factor)
    }
}

/// Accumulator for sums of mixed-sign log-space terms.
///
/// Positive and negative terms are accumulated in two separate positive
/// log-sums and combined only when the total is requested, deferring
/// cancellation to a single subtraction.
#[derive(Debug, Clone, Copy)]
pub struct SignedLogSum {
    log_pos: f64,
    log_neg: f64,
}

impl SignedLogSum {
    /// An empty sum.
    pub fn new() -> Self {
        SignedLogSum {
            log_pos: f64::NEG_INFINITY,
            log_neg: f64::NEG_INFINITY,
        }
    }

    /// Adds one signed term.
    pub fn add(&mut self, term: SignedLog) {
        match term.sign {
            1 => self.log_pos = log_add_exp(self.log_pos, term.logmag),
            -1 => self.log_neg = log_add_exp(self.log_neg, term.logmag),
            _ => {}
        }
    }

    /// Log of the positive-part accumulator (used for convergence thresholds).
    pub fn log_positive(&self) -> f64 {
        self.log_pos
    }

    /// Combines the two accumulators into the signed total.
    pub fn total(&self) -> SignedLog {
        if self.log_pos >= self.log_neg {
            match log_sub_exp(self.log_pos, self.log_neg) {
                Ok(lm) => SignedLog::new(1, lm),
                Err(_) => SignedLog::ZERO,
            }
        } else {
            match log_sub_exp(self.log_neg, self.log_pos) {
                Ok(lm) => SignedLog::new(-1, lm),
                Err(_) => SignedLog::ZERO,
            }
        }
    }
}

impl Default for SignedLogSum {
    fn default() -> Self {
        Self::new()
    }
}

/// Generalized binomial coefficient `C(alpha, k)` in sign/log form.
///
/// Computed as a running product of `|alpha - i| / (i + 1)` factors with
/// explicit sign tracking rather than through `lgamma`, so fractional
/// `alpha` arbitrarily close to an integer never hits a pole. For integer
/// `alpha` and `k > alpha` the result is exactly zero; for fractional
/// `alpha` the signs alternate once `k` exceeds `ceil(alpha)`.
pub fn log_binom(alpha: f64, k: u64) -> SignedLog {
    let mut sign: i8 = 1;
    let mut logmag = 0.0_f64;
    for i in 0..k {
        let factor = alpha - i as f64;
        if factor == 0.0 {
            return SignedLog::ZERO;
        }
        if factor < 0.0 {
            sign = -sign;
        }
        logmag += factor.abs().ln() - ((i + 1) as f64).ln();
    }
    SignedLog::new(sign, logmag)
}

/// Discard threshold between the direct and asymptotic branches of
/// [`log_erfc`]: the direct path is used while `erfc(x)` is comfortably
/// above the smallest normal `f64`.
const ERFC_DIRECT_MIN: f64 = f64::MIN_POSITIVE * 1e10;

/// Returns `ln(erfc(x))` accurately for all `x`, including large positive
/// `x` where `erfc` itself underflows.
///
/// For `x <= 0` and wherever `erfc(x)` is far from the underflow boundary
/// the log of the directly evaluated function is returned; beyond that the
/// asymptotic expansion
/// `ln erfc(x) = -x^2 - ln(x sqrt(pi)) + ln(1 - 1/(2x^2) + 3/(4x^4) - ...)`
/// is used, truncated once its terms drop below 1e-17 relative.
pub fn log_erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 {
        return libm::erfc(x).ln();
    }
    let direct = libm::erfc(x);
    if direct > ERFC_DIRECT_MIN {
        return direct.ln();
    }
    log_erfc_asymptotic(x)
}

fn log_erfc_asymptotic(x: f64) -> f64 {
    if x == f64::INFINITY {
        return f64::NEG_INFINITY;
    }
    let inv_2x2 = 1.0 / (2.0 * x * x);
    // series = sum_{n>=1} (-1)^n (2n-1)!! / (2 x^2)^n, added to 1 via ln_1p.
    let mut series = 0.0_f64;
    let mut term = 1.0_f64;
    let mut n = 1u32;
    loop {
        let next = -term * (2.0 * n as f64 - 1.0) * inv_2x2;
        if next.abs() >= term.abs() && n > 1 {
            break; // asymptotic series started diverging
        }
        term = next;
        series += term;
        if term.abs() < 1e-17 * (1.0 + series).abs() {
            break;
        }
        n += 1;
    }
    -x * x - x.ln() - LN_SQRT_PI + series.ln_1p()
}
