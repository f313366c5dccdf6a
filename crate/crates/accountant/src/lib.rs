//! Renyi differential privacy accounting for the sampled Gaussian
//! mechanism.
//!
//! The sampled Gaussian mechanism applies a sensitivity-1 function to a
//! Poisson subsample of a dataset (each record kept independently with
//! probability `q`) and adds `N(0, sigma^2)` noise. This crate computes
//! the mechanism's Renyi divergence `eps(alpha)` exactly for any order
//! `alpha > 1`, evaluates a closed-form upper bound with its
//! applicability conditions, composes privacy across steps, converts RDP
//! curves to `(eps, delta)`-DP, and calibrates the noise scale against a
//! target budget.
//!
//! All series computation happens in signed log space ([`logmath`]), and
//! every computed quantity can be checked against an independent
//! quadrature / Monte Carlo oracle ([`oracle`]).
//!
//! ```
//! use sgm_accountant::{compose, compute_rdp, default_orders, to_dp, RdpCurve, SgmParams};
//!
//! let params = SgmParams::new(0.01, 1.1).unwrap();
//! let eps_at_8 = compute_rdp(&params, 8.0).unwrap();
//! assert!(eps_at_8 > 0.0);
//!
//! let curve = RdpCurve::compute(&params, &default_orders()).unwrap();
//! let guarantee = to_dp(&compose(&curve, 1_000), 1e-5).unwrap();
//! assert!(guarantee.eps.is_finite());
//! ```

pub mod budget;
pub mod closed_form;
pub mod error;
pub mod logmath;
pub mod oracle;
pub mod rdp;

pub use budget::{calibrate_sigma, compose, default_orders, to_dp, DpGuarantee, DpTarget};
pub use closed_form::{bound_a1, bound_a2, closed_form_bound, BoundReport};
pub use error::{Error, Result};
pub use logmath::{log_add_exp, log_binom, log_erfc, log_sub_exp, SignedLog, SignedLogSum};
pub use oracle::{check_pointwise_lemma, mc_estimate_a, quad_a, quad_b, QuadratureResult};
pub use rdp::{compute_log_a_frac, compute_log_a_int, compute_rdp, RdpCurve, RdpPoint, SgmParams};
