//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with its measured runtime (visible with `--nocapture`) and
//! enforcing both the stated numerical tolerance and the stated time
//! budget.
//!
//! Run with:
//!   cargo test -p sgm-cli --test acceptance -- --nocapture

use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use sgm_accountant::{
    calibrate_sigma, check_pointwise_lemma, closed_form_bound, compose, compute_log_a_frac,
    compute_log_a_int, compute_rdp, default_orders, quad_a, quad_b, to_dp, DpTarget, RdpCurve,
    SgmParams,
};

fn params(q: f64, sigma: f64) -> SgmParams {
    SgmParams::new(q, sigma).unwrap()
}

fn rel_err(actual: f64, expected: f64) -> f64 {
    (actual - expected).abs() / expected.abs().max(f64::MIN_POSITIVE)
}

fn finish(criterion: &str, detail: &str, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    assert!(
        elapsed <= budget,
        "{criterion}: runtime {elapsed:.2?} exceeds budget {budget:.2?}"
    );
    println!("{criterion}: PASS ({detail}; {elapsed:.2?})");
}

#[test]
fn criterion_01_plain_gaussian_degeneration() {
    let started = Instant::now();
    let mut worst = 0.0_f64;
    for sigma in [0.5, 1.0, 2.0, 4.0, 10.0] {
        for alpha in [1.5, 2.0, 3.0, 8.0, 32.0, 64.0] {
            let eps = compute_rdp(&params(1.0, sigma), alpha).unwrap();
            let expected = alpha / (2.0 * sigma * sigma);
            let err = rel_err(eps, expected);
            assert!(
                err <= 1e-10,
                "q=1 sigma={sigma} alpha={alpha}: eps {eps} vs {expected}"
            );
            worst = worst.max(err);
        }
    }
    finish(
        "criterion 1 (plain-Gaussian degeneration)",
        &format!("max rel err {worst:.2e}"),
        started,
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_02_integer_order_two_closed_form() {
    let started = Instant::now();
    let mut worst = 0.0_f64;
    for q in [0.001, 0.01, 0.1, 0.5] {
        for sigma in [1.0, 4.0, 10.0] {
            let log_a = compute_log_a_int(&params(q, sigma), 2);
            let expected = (q * q * (1.0 / (sigma * sigma)).exp_m1()).ln_1p();
            let err = (log_a - expected).abs();
            assert!(
                err <= 1e-12,
                "q={q} sigma={sigma}: ln A_2 {log_a} vs {expected} (abs err {err:.3e})"
            );
            worst = worst.max(err);
        }
    }
    finish(
        "criterion 2 (integer-order closed form)",
        &format!("max abs err {worst:.2e}"),
        started,
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_03_fractional_path_agrees_at_integer_orders() {
    let started = Instant::now();
    let mut worst = 0.0_f64;
    for alpha in 2u64..=32 {
        for q in [0.01, 0.1, 0.5] {
            for sigma in [1.0, 4.0, 10.0] {
                let p = params(q, sigma);
                let from_int = compute_log_a_int(&p, alpha);
                let from_frac = compute_log_a_frac(&p, alpha as f64).unwrap();
                let err = rel_err(from_frac, from_int);
                assert!(
                    err <= 1e-9,
                    "alpha={alpha} q={q} sigma={sigma}: frac {from_frac} vs int {from_int} (rel {err:.3e})"
                );
                worst = worst.max(err);
            }
        }
    }
    finish(
        "criterion 3 (integer/fractional path agreement)",
        &format!("max rel err {worst:.2e}"),
        started,
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_04_series_matches_quadrature_oracle() {
    let started = Instant::now();
    let mut worst = 0.0_f64;
    for q in [0.01, 0.05, 0.1, 0.2] {
        for sigma in [1.0, 4.0, 10.0] {
            for alpha in [1.5, 2.5, 4.0, 8.0, 16.0, 32.0] {
                let p = params(q, sigma);
                let eps = compute_rdp(&p, alpha).unwrap();
                let oracle = quad_a(&p, alpha, 1e-10).unwrap().value.ln() / (alpha - 1.0);
                let err = rel_err(eps, oracle);
                assert!(
                    err <= 1e-6,
                    "q={q} sigma={sigma} alpha={alpha}: eps {eps} vs oracle {oracle} (rel {err:.3e})"
                );
                worst = worst.max(err);
            }
        }
    }
    finish(
        "criterion 4 (oracle equivalence)",
        &format!("max rel err {worst:.2e}"),
        started,
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_05_a_dominates_b() {
    let started = Instant::now();
    let mut points = 0u32;
    for q in [0.01, 0.05, 0.1, 0.2, 0.5] {
        for sigma in [1.0, 4.0, 10.0] {
            for alpha in [1.5, 2.5, 4.0, 8.0, 16.0, 32.0] {
                let p = params(q, sigma);
                let a = quad_a(&p, alpha, 1e-10).unwrap().value;
                let b = quad_b(&p, alpha, 1e-10).unwrap().value;
                assert!(
                    a >= b - 1e-9 * a,
                    "q={q} sigma={sigma} alpha={alpha}: A {a} < B {b}"
                );
                points += 1;
            }
        }
    }
    finish(
        "criterion 5 (A dominates B)",
        &format!("{points} grid points"),
        started,
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_06_closed_form_bound_is_sound() {
    let started = Instant::now();
    let mut applicable = 0u32;
    let mut ratio_min = f64::INFINITY;
    let mut ratio_max = 0.0_f64;
    for q in [0.01, 0.05, 0.1, 0.2] {
        for sigma in [4.0, 10.0] {
            for alpha_i in 2u32..=64 {
                let alpha = f64::from(alpha_i);
                let p = params(q, sigma);
                let report = closed_form_bound(&p, alpha).unwrap();
                let Some(bound) = report.eps_bound else {
                    continue;
                };
                applicable += 1;
                let exact = compute_rdp(&p, alpha).unwrap();
                assert!(
                    bound >= exact,
                    "q={q} sigma={sigma} alpha={alpha}: bound {bound} < exact {exact}"
                );
                let ratio = bound / exact;
                ratio_min = ratio_min.min(ratio);
                ratio_max = ratio_max.max(ratio);
            }
        }
    }
    assert!(applicable > 0, "grid must contain applicable points");
    // The ratio is recorded, not asserted against a fixed constant.
    finish(
        "criterion 6 (closed-form soundness)",
        &format!("{applicable} applicable points, bound/exact in [{ratio_min:.3}, {ratio_max:.3}]"),
        started,
        Duration::from_secs(60),
    );
}

#[derive(Debug)]
struct SweepRow {
    q: f64,
    sigma: f64,
    alpha: f64,
    eps_exact: f64,
    eps_bound: Option<f64>,
    cond_alpha1: bool,
    cond_alpha2: bool,
}

fn run_sweep(q_values: &str, sigma_values: &str, orders: &str) -> Vec<SweepRow> {
    let out = Command::new(env!("CARGO_BIN_EXE_sgm"))
        .args([
            "sweep",
            "--q-values",
            q_values,
            "--sigma-values",
            sigma_values,
            "--orders",
            orders,
        ])
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "sweep failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "q,sigma,alpha,eps_exact,eps_bound,cond_alpha1,cond_alpha2,cond_range"
    );
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            SweepRow {
                q: f[0].parse().unwrap(),
                sigma: f[1].parse().unwrap(),
                alpha: f[2].parse().unwrap(),
                eps_exact: f[3].parse().unwrap(),
                eps_bound: (!f[4].is_empty()).then(|| f[4].parse().unwrap()),
                cond_alpha1: f[5] == "true",
                cond_alpha2: f[6] == "true",
            }
        })
        .collect()
}

#[test]
fn criterion_07_sweep_reproduces_bound_geometry() {
    let started = Instant::now();
    let q_grid = [0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.15, 0.2];
    let orders: Vec<String> = (2..=64).map(|a| a.to_string()).collect();
    let rows = run_sweep(
        "0.001,0.002,0.005,0.01,0.02,0.05,0.1,0.15,0.2",
        "4,10",
        &orders.join(","),
    );
    assert_eq!(rows.len(), q_grid.len() * 2 * 63);

    for sigma in [4.0, 10.0] {
        // (a) the largest order satisfying both order conditions shrinks
        // (weakly) as the sampling rate grows.
        let mut prev_max: Option<f64> = None;
        for &q in &q_grid {
            let max_alpha = rows
                .iter()
                .filter(|r| r.sigma == sigma && r.q == q && r.cond_alpha1 && r.cond_alpha2)
                .map(|r| r.alpha)
                .fold(f64::NAN, f64::max);
            assert!(
                max_alpha.is_finite(),
                "sigma={sigma} q={q}: no feasible order"
            );
            if let Some(prev) = prev_max {
                assert!(
                    max_alpha <= prev,
                    "sigma={sigma}: max feasible order grew from {prev} to {max_alpha} at q={q}"
                );
            }
            prev_max = Some(max_alpha);
        }

        // (b) bound and exact curves converge as q -> 0: at a fixed order
        // the gap shrinks monotonically with q, and the ratio stabilizes
        // near its small-q limit.
        let at_alpha8: Vec<&SweepRow> = rows
            .iter()
            .filter(|r| r.sigma == sigma && r.alpha == 8.0 && r.eps_bound.is_some())
            .collect();
        assert!(at_alpha8.len() >= 4, "sigma={sigma}: too few bounded rows");
        for pair in at_alpha8.windows(2) {
            let gap_small_q = pair[0].eps_bound.unwrap() - pair[0].eps_exact;
            let gap_larger_q = pair[1].eps_bound.unwrap() - pair[1].eps_exact;
            assert!(
                gap_small_q <= gap_larger_q,
                "sigma={sigma}: gap must shrink toward q=0 ({gap_small_q} vs {gap_larger_q})"
            );
        }
        // Small-q limit of bound/exact is 4 / (sigma^2 (e^(1/sigma^2) - 1)),
        // i.e. just under 4: the bound tracks the exact curve within a
        // small constant factor.
        let ratio0 = at_alpha8[0].eps_bound.unwrap() / at_alpha8[0].eps_exact;
        let ratio1 = at_alpha8[1].eps_bound.unwrap() / at_alpha8[1].eps_exact;
        assert!(
            ratio0 > 1.0 && ratio0 < 4.2,
            "sigma={sigma}: ratio {ratio0}"
        );
        assert!(
            (ratio0 - ratio1).abs() <= 0.05 * ratio0,
            "sigma={sigma}: ratio should stabilize, got {ratio0} then {ratio1}"
        );
    }
    finish(
        "criterion 7 (sweep reproduces bound geometry)",
        &format!("{} rows checked", rows.len()),
        started,
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_08_property_suites() {
    let started = Instant::now();

    // Order monotonicity over mixed fractional/integer grids.
    let orders = [1.25, 1.5, 2.0, 2.5, 3.0, 4.5, 8.0, 12.5, 16.0, 32.0, 64.0];
    for q in [0.01, 0.1, 0.5] {
        for sigma in [0.7, 1.0, 4.0] {
            let p = params(q, sigma);
            let mut prev = 0.0_f64;
            for alpha in orders {
                let eps = compute_rdp(&p, alpha).unwrap();
                assert!(
                    eps >= prev * (1.0 - 1e-9),
                    "order monotonicity broken at q={q} sigma={sigma} alpha={alpha}"
                );
                prev = eps;
            }
        }
    }

    // q-monotonicity including both endpoints.
    let q_grid = [0.0, 0.001, 0.01, 0.05, 0.1, 0.2, 0.35, 0.5, 0.75, 0.9, 1.0];
    for sigma in [1.0, 4.0] {
        for alpha in [1.5, 2.0, 8.0] {
            let mut prev = -1.0_f64;
            for q in q_grid {
                let eps = compute_rdp(&params(q, sigma), alpha).unwrap();
                assert!(
                    eps >= prev * (1.0 - 1e-9),
                    "q monotonicity broken at sigma={sigma} alpha={alpha} q={q}"
                );
                prev = eps;
            }
        }
    }

    // sigma-monotonicity.
    for q in [0.01, 0.3] {
        for alpha in [1.5, 8.0] {
            let mut prev = f64::INFINITY;
            for sigma in [0.5, 0.8, 1.0, 2.0, 4.0, 8.0, 16.0] {
                let eps = compute_rdp(&params(q, sigma), alpha).unwrap();
                assert!(
                    eps <= prev * (1.0 + 1e-9),
                    "sigma monotonicity broken at q={q} alpha={alpha} sigma={sigma}"
                );
                prev = eps;
            }
        }
    }

    // Pointwise integrand inequality, 1e5 draws: u, v log-uniform over
    // [e^-10, e^10], q uniform, alpha log-uniform over (1, 64].
    let mut rng = ChaCha12Rng::seed_from_u64(0x5f3759df);
    for i in 0..100_000 {
        let u = rng.gen_range(-10.0..10.0f64).exp();
        let v = rng.gen_range(-10.0..10.0f64).exp();
        let q = rng.gen_range(0.0..=1.0);
        let alpha = rng.gen_range(0.0..(64.0f64).ln()).exp().max(1.0 + 1e-12);
        assert!(
            check_pointwise_lemma(u, v, q, alpha),
            "pointwise inequality violated at draw {i}: u={u} v={v} q={q} alpha={alpha}"
        );
    }

    // Symmetric two-point inequality, 1e4 draws with the ratio confined
    // to [1/r0, r0].
    for i in 0..10_000 {
        let v = rng.gen_range(-9.0..9.0f64).exp();
        let q: f64 = rng.gen_range(1e-6..1.0);
        let alpha = rng.gen_range(1.0001..64.0f64);
        let r0 = 1.0 + 1.0 / (q * (alpha - 1.0));
        let span = r0.ln().min(15.0);
        let r = rng.gen_range(-span..=span).exp();
        let u = r * v;
        let y = (1.0 - q) + q * r;
        let z = (1.0 - q) + q / r;
        let lhs = v * y.powf(alpha) + u * z.powf(alpha);
        let rhs = (u + v) + q * q * alpha * (alpha - 1.0) * (u * u / v + v * v / u - (u + v));
        assert!(
            lhs <= rhs * (1.0 + 1e-11),
            "symmetric inequality violated at draw {i}: v={v} r={r} q={q} alpha={alpha}"
        );
    }

    // x^2/y + y^2/x - (x + y) >= 0, 1e5 draws.
    for i in 0..100_000 {
        let x = rng.gen_range(-12.0..12.0f64).exp();
        let y = rng.gen_range(-12.0..12.0f64).exp();
        let excess = x * x / y + y * y / x - (x + y);
        assert!(
            excess >= -1e-12 * (x * x / y + y * y / x),
            "non-negativity violated at draw {i}: x={x} y={y}"
        );
    }

    finish(
        "criterion 8 (property suites)",
        "monotonicity grids + 2.1e5 random draws, zero violations",
        started,
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_09_calibration_round_trip() {
    let started = Instant::now();
    let orders = default_orders();
    let reference = params(0.01, 4.0);
    let curve = RdpCurve::compute(&reference, &orders).unwrap();
    let e_star = to_dp(&compose(&curve, 1_000), 1e-5).unwrap().eps;

    let target = DpTarget::new(e_star, 1e-5).unwrap();
    let sigma = calibrate_sigma(0.01, 1_000, &target, &orders).unwrap();
    assert!(
        (sigma - 4.0).abs() <= 4.0 * 1e-3,
        "recovered sigma {sigma} not within 1e-3 relative of 4"
    );

    // Minimality: the recovered sigma meets the target, shrinking it by
    // 1e-3 relative must miss it.
    let forward = |s: f64| {
        let c = RdpCurve::compute(&params(0.01, s), &orders).unwrap();
        to_dp(&compose(&c, 1_000), 1e-5).unwrap().eps
    };
    assert!(forward(sigma) <= e_star);
    assert!(forward(sigma * (1.0 - 1e-3)) > e_star);

    finish(
        "criterion 9 (calibration round-trip)",
        &format!("recovered sigma {sigma:.6}"),
        started,
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_10_performance() {
    let orders = default_orders();

    // Full default-grid curve for one (q, sigma) in under 100 ms,
    // including the slower moderate-q small-sigma fractional regime.
    let mut slowest = Duration::ZERO;
    for (q, sigma) in [(0.01, 1.0), (0.2, 1.0)] {
        let p = params(q, sigma);
        let t = Instant::now();
        let curve = RdpCurve::compute(&p, &orders).unwrap();
        let elapsed = t.elapsed();
        assert_eq!(curve.points().len(), 72);
        assert!(
            elapsed < Duration::from_millis(100),
            "curve at q={q} sigma={sigma} took {elapsed:.2?}"
        );
        slowest = slowest.max(elapsed);
    }

    // The accountant-side work of the full acceptance grid in well under
    // five minutes (the per-criterion budgets above bound the rest).
    let grid_start = Instant::now();
    let mut evaluations = 0u32;
    for q in [0.01, 0.05, 0.1, 0.2, 0.5] {
        for sigma in [1.0, 4.0, 10.0] {
            for alpha in [1.5, 2.5, 4.0, 8.0, 16.0, 32.0, 64.0] {
                let p = params(q, sigma);
                compute_rdp(&p, alpha).unwrap();
                closed_form_bound(&p, alpha).unwrap();
                evaluations += 2;
            }
        }
    }
    let grid_elapsed = grid_start.elapsed();
    assert!(
        grid_elapsed < Duration::from_secs(300),
        "acceptance grid took {grid_elapsed:.2?}"
    );

    println!(
        "criterion 10 (performance): PASS (slowest curve {slowest:.2?}, {evaluations} grid evaluations in {grid_elapsed:.2?})"
    );
}
