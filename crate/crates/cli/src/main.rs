//! `sgm`: a command-line Renyi-DP accountant for the sampled Gaussian
//! mechanism.
//!
//! Exit codes: 0 on success, 2 on argument or validation errors, 3 on
//! numerical non-convergence.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sgm_accountant::{
    calibrate_sigma, closed_form_bound, compose, compute_rdp, default_orders, to_dp, DpTarget,
    Error, RdpCurve, SgmParams,
};

#[derive(Parser)]
#[command(
    name = "sgm",
    version,
    about = "Renyi differential privacy accounting for the sampled Gaussian mechanism",
    arg_required_else_help = true
)]
struct Cli {
    /// Emit machine-readable JSON instead of text (ignored by `sweep`,
    /// whose CSV output is already machine-readable)
    #[arg(long, global = true)]
    json: bool,

    /// Suppress headers and auxiliary output lines
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the RDP curve eps(alpha) of one mechanism invocation
    Rdp {
        /// Sampling rate in [0, 1]
        #[arg(long)]
        q: f64,
        /// Noise standard deviation in sensitivity units
        #[arg(long)]
        sigma: f64,
        /// Comma-separated Renyi orders, or "default" for the built-in grid
        #[arg(long, default_value = "default")]
        orders: String,
    },
    /// Compose the RDP curve over a number of steps
    Compose {
        #[arg(long)]
        q: f64,
        #[arg(long)]
        sigma: f64,
        #[arg(long, default_value = "default")]
        orders: String,
        /// Number of sequential mechanism applications
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        steps: u64,
    },
    /// Convert a (composed) RDP curve to an (eps, delta) guarantee
    Convert {
        #[arg(long)]
        q: f64,
        #[arg(long)]
        sigma: f64,
        #[arg(long, default_value = "default")]
        orders: String,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        steps: u64,
        /// Target delta in (0, 1)
        #[arg(long)]
        delta: f64,
    },
    /// Find the smallest sigma meeting an (eps, delta) target
    Calibrate {
        #[arg(long)]
        q: f64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        steps: u64,
        /// Target epsilon
        #[arg(long)]
        eps: f64,
        /// Target delta in (0, 1)
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value = "default")]
        orders: String,
    },
    /// Emit exact and closed-form-bound epsilons over a parameter grid as CSV
    Sweep {
        /// Comma-separated sampling rates
        #[arg(long, value_delimiter = ',', required = true)]
        q_values: Vec<f64>,
        /// Comma-separated noise standard deviations
        #[arg(long, value_delimiter = ',', required = true)]
        sigma_values: Vec<f64>,
        #[arg(long, default_value = "default")]
        orders: String,
        /// Output path; standard output when omitted
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// 3 for numerical non-convergence, 2 for everything else (argument and
/// validation problems).
fn exit_code(err: &CliError) -> u8 {
    match err {
        CliError::Accountant(Error::NonConvergence { .. })
        | CliError::Accountant(Error::ToleranceNotMet { .. }) => 3,
        _ => 2,
    }
}

#[derive(Debug)]
enum CliError {
    Accountant(Error),
    Usage(String),
    Io(io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Accountant(e) => e.fmt(f),
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Io(e) => e.fmt(f),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Accountant(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Rdp { q, sigma, orders } => {
            let curve = curve_for(*q, *sigma, orders, 1)?;
            print_curve(cli, *q, *sigma, &curve)
        }
        Command::Compose {
            q,
            sigma,
            orders,
            steps,
        } => {
            let curve = curve_for(*q, *sigma, orders, *steps)?;
            print_curve(cli, *q, *sigma, &curve)
        }
        Command::Convert {
            q,
            sigma,
            orders,
            steps,
            delta,
        } => {
            let curve = curve_for(*q, *sigma, orders, *steps)?;
            let guarantee = to_dp(&curve, *delta)?;
            if cli.json {
                println!("{}", serde_json::to_string(&guarantee).unwrap());
            } else {
                println!(
                    "eps={} delta={} best_order={}",
                    guarantee.eps, guarantee.delta, guarantee.best_order
                );
            }
            Ok(())
        }
        Command::Calibrate {
            q,
            steps,
            eps,
            delta,
            orders,
        } => {
            let orders = parse_orders(orders)?;
            let target = DpTarget::new(*eps, *delta)?;
            let sigma = calibrate_sigma(*q, *steps, &target, &orders)?;
            let params = SgmParams::new(*q, sigma)?;
            let curve = compose(&RdpCurve::compute(&params, &orders)?, *steps);
            let achieved = to_dp(&curve, *delta)?;
            if cli.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "sigma": sigma,
                        "eps": achieved.eps,
                        "delta": achieved.delta,
                        "best_order": achieved.best_order,
                    })
                );
            } else {
                println!(
                    "sigma={} eps={} delta={} best_order={}",
                    sigma, achieved.eps, achieved.delta, achieved.best_order
                );
            }
            Ok(())
        }
        Command::Sweep {
            q_values,
            sigma_values,
            orders,
            output,
        } => {
            let orders = parse_orders(orders)?;
            match output {
                Some(path) => {
                    let mut w = BufWriter::new(File::create(path)?);
                    write_sweep(&mut w, q_values, sigma_values, &orders)
                }
                None => {
                    let stdout = io::stdout();
                    let mut w = BufWriter::new(stdout.lock());
                    write_sweep(&mut w, q_values, sigma_values, &orders)
                }
            }
        }
    }
}

fn curve_for(q: f64, sigma: f64, orders: &str, steps: u64) -> Result<RdpCurve, CliError> {
    let orders = parse_orders(orders)?;
    let params = SgmParams::new(q, sigma)?;
    let curve = RdpCurve::compute(&params, &orders)?;
    Ok(compose(&curve, steps))
}

/// `"default"` for the built-in grid, otherwise a comma-separated list.
/// The list is sorted and deduplicated.
fn parse_orders(arg: &str) -> Result<Vec<f64>, CliError> {
    if arg.trim() == "default" {
        return Ok(default_orders());
    }
    let mut orders = arg
        .split(',')
        .map(|field| {
            let field = field.trim();
            match field.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(CliError::Usage(format!("invalid order '{field}'"))),
            }
        })
        .collect::<Result<Vec<f64>, _>>()?;
    if orders.is_empty() {
        return Err(CliError::Usage("at least one order is required".into()));
    }
    orders.sort_by(|a, b| a.total_cmp(b));
    orders.dedup();
    Ok(orders)
}

fn print_curve(cli: &Cli, q: f64, sigma: f64, curve: &RdpCurve) -> Result<(), CliError> {
    if cli.json {
        println!(
            "{}",
            serde_json::json!({
                "q": q,
                "sigma": sigma,
                "steps": curve.steps(),
                "points": curve.points(),
            })
        );
        return Ok(());
    }
    if !cli.quiet {
        println!("# q={} sigma={} steps={}", q, sigma, curve.steps());
        println!("order eps");
    }
    for p in curve.points() {
        println!("{} {}", p.order, p.eps);
    }
    Ok(())
}

/// One CSV row per grid point, `q` outermost, `sigma` middle, `alpha`
/// innermost, in the order given on the command line. `eps_bound` is empty
/// where the closed-form conditions fail. Floats are printed in their
/// shortest round-trip form, so identical flags reproduce identical bytes.
fn write_sweep(
    w: &mut impl Write,
    q_values: &[f64],
    sigma_values: &[f64],
    orders: &[f64],
) -> Result<(), CliError> {
    writeln!(
        w,
        "q,sigma,alpha,eps_exact,eps_bound,cond_alpha1,cond_alpha2,cond_range"
    )?;
    for &q in q_values {
        for &sigma in sigma_values {
            let params = SgmParams::new(q, sigma)?;
            for &alpha in orders {
                let eps_exact = compute_rdp(&params, alpha)?;
                let report = closed_form_bound(&params, alpha)?;
                let bound = report.eps_bound.map(|b| b.to_string()).unwrap_or_default();
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{}",
                    q,
                    sigma,
                    alpha,
                    eps_exact,
                    bound,
                    report.cond_alpha1,
                    report.cond_alpha2,
                    report.cond_range
                )?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
