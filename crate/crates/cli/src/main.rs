//! `vcorr`: runs the identity verification suite, computes the correlation
//! coefficient and the ring correlation by any of their independent routes,
//! and sweeps the model-energy minimizer.
//!
//! Exit codes: 0 when every requested check passes, 1 when a computation
//! fails its own verification, 2 on usage or I/O errors. Set
//! `RAYON_NUM_THREADS` to bound worker threads; numeric output is identical
//! for any thread count.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use vortex_correlation::algebra::{correlation_coefficient, gamma_closed, ii_value};
use vortex_correlation::landscape::{fitted_scaling_slope, sweep_minimizers};
use vortex_correlation::quadrature::{a0_numeric, regularized_integral, QuadratureSpec};
use vortex_correlation::report::{run_identity_suite, VerificationReport};
use vortex_correlation::residue::{gamma_by_angular_quadrature, gamma_by_residue, ii_by_gamma};
use vortex_correlation::series::i_by_series;

#[derive(Parser)]
#[command(
    name = "vcorr",
    version,
    about = "Cross-checked computation of the vortex correlation coefficient"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the identity suite for orders 2..=N and emit a verification report.
    Verify {
        /// Largest polygon order included in the suite (2..=16).
        #[arg(long, default_value_t = 6)]
        n: u32,
        /// Tolerance applied to exact identities.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Report format.
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Also write the rendered report to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the correlation coefficient by a chosen route.
    A0 {
        /// Polygon order (at least 2).
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        n: u32,
        /// Charge multiplier of the outer vortices (nonzero).
        #[arg(long, default_value_t = 1)]
        m: i64,
        #[arg(long, value_enum, default_value_t = A0Method::Closed)]
        method: A0Method,
        /// Radial tolerance of the quadrature routes; series target otherwise.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Comma-separated strictly decreasing exclusion radii.
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        /// Outer truncation radius of the quadrature domain.
        #[arg(long)]
        outer: Option<f64>,
        /// Base angular sample count (power of two, at least 64).
        #[arg(long)]
        angular: Option<usize>,
    },
    /// Evaluate the ring correlation Gamma(rho) by a chosen route.
    Gamma {
        /// Polygon order (at least 2).
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        n: u32,
        /// Ring radius; the closed form jumps at rho = 1.
        #[arg(long)]
        rho: f64,
        #[arg(long, value_enum, default_value_t = GammaMethod::Closed)]
        method: GammaMethod,
    },
    /// Sweep the model-energy minimizer over stiffness values as CSV.
    Landscape {
        /// Gradient-cost coefficient of the model energy (positive).
        #[arg(long)]
        j: f64,
        /// Comma-separated stiffness values.
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<f64>,
        /// Write the CSV sweep to this path instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-render a stored JSON verification report.
    Report {
        /// Report previously produced by `vcorr verify --format json`.
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Also write the rendered report to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum A0Method {
    /// Exact closed form of the cancelling difference.
    Closed,
    /// Series route for the first term minus the ring-correlation route.
    #[value(alias = "series_residue")]
    SeriesResidue,
    /// Principal-value quadrature with vanishing exclusion radii.
    Pv,
    /// Counterterm-regularized quadrature without principal values.
    Regularized,
}

#[derive(Clone, Copy, ValueEnum)]
enum GammaMethod {
    Closed,
    Residue,
    Quadrature,
}

struct CmdError {
    code: u8,
    message: String,
}

impl From<vortex_correlation::Error> for CmdError {
    fn from(e: vortex_correlation::Error) -> Self {
        use vortex_correlation::Error as E;
        let code = match e {
            E::InvalidOrder(_)
            | E::InvalidIndex { .. }
            | E::DegenerateConfiguration(_)
            | E::Domain(_)
            | E::JumpPoint
            | E::InvalidSpec(_)
            | E::Serialization(_) => 2,
            _ => 1,
        };
        Self { code, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8, CmdError> {
    match cli.command {
        Command::Verify { n, tol, format, out } => cmd_verify(n, tol, format, out.as_deref()),
        Command::A0 { n, m, method, tol, eps, outer, angular } => {
            cmd_a0(n, m, method, tol, eps, outer, angular)
        }
        Command::Gamma { n, rho, method } => cmd_gamma(n, rho, method),
        Command::Landscape { j, k, out } => cmd_landscape(j, &k, out.as_deref()),
        Command::Report { input, format, out } => cmd_report(&input, format, out.as_deref()),
    }
}

fn cmd_verify(max_n: u32, tol: f64, format: Format, out: Option<&Path>) -> Result<u8, CmdError> {
    let report = run_identity_suite(max_n, tol)?;
    let rendered = render(&report, format)?;
    print!("{rendered}");
    if let Some(path) = out {
        write_file(path, &rendered)?;
    }
    Ok(if report.all_pass() { 0 } else { 1 })
}

#[allow(clippy::too_many_arguments)]
fn cmd_a0(
    n: u32,
    m: i64,
    method: A0Method,
    tol: f64,
    eps: Option<Vec<f64>>,
    outer: Option<f64>,
    angular: Option<usize>,
) -> Result<u8, CmdError> {
    if m == 0 {
        return Err(CmdError { code: 2, message: "charge multiplier m must be nonzero".into() });
    }
    let (label, value, error) = match method {
        A0Method::Closed => ("closed", correlation_coefficient(n, m), 0.0),
        A0Method::SeriesResidue => {
            let series = i_by_series(n, tol)?;
            let gamma = ii_by_gamma(n, tol)?;
            let quarter_m4 = (m as f64).powi(4) / 4.0;
            let value = quarter_m4 * (series.value - gamma.value);
            let error = quarter_m4 * (series.error_estimate + tol * ii_value(n));
            ("series-residue", value, error)
        }
        A0Method::Pv => {
            let result = a0_numeric(n, m, &build_spec(eps, outer, angular, tol, false))?;
            ("pv", result.value, result.error_estimate)
        }
        A0Method::Regularized => {
            let result = regularized_integral(n, m, &build_spec(eps, outer, angular, tol, true))?;
            ("regularized", result.value / 4.0, result.error_estimate / 4.0)
        }
    };
    println!("a0(N={n}, m={m}) by {label}: {value:.16e} +/- {error:.16e}");
    Ok(if value.abs() <= error { 0 } else { 1 })
}

fn build_spec(
    eps: Option<Vec<f64>>,
    outer: Option<f64>,
    angular: Option<usize>,
    tol: f64,
    use_counterterm: bool,
) -> QuadratureSpec {
    let mut spec = QuadratureSpec::default();
    if let Some(eps) = eps {
        spec.epsilon_schedule = eps;
    }
    if let Some(outer) = outer {
        spec.outer_radius = outer;
    }
    if let Some(angular) = angular {
        spec.angular_samples = angular;
    }
    spec.radial_tol = tol;
    spec.use_counterterm = use_counterterm;
    spec
}

fn cmd_gamma(n: u32, rho: f64, method: GammaMethod) -> Result<u8, CmdError> {
    let (label, value) = match method {
        GammaMethod::Closed => ("closed", gamma_closed(n, rho)?),
        GammaMethod::Residue => ("residue", gamma_by_residue(n, rho)?),
        GammaMethod::Quadrature => ("quadrature", gamma_by_angular_quadrature(n, rho)?),
    };
    println!("gamma(N={n}, rho={rho}) by {label}: {value:.16e}");
    Ok(0)
}

fn cmd_landscape(j: f64, ks: &[f64], out: Option<&Path>) -> Result<u8, CmdError> {
    let rows = sweep_minimizers(j, ks)?;
    let mut csv = String::from("k,J,l_star,energy_at_min\n");
    for row in &rows {
        let _ = writeln!(
            csv,
            "{:.16e},{:.16e},{:.16e},{:.16e}",
            row.k, row.j, row.l_star, row.energy_at_min
        );
    }
    if rows.len() >= 2 {
        let _ = writeln!(csv, "# fitted_log_log_slope = {:.16e}", fitted_scaling_slope(&rows));
    }
    match out {
        Some(path) => write_file(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(0)
}

fn cmd_report(input: &Path, format: Format, out: Option<&Path>) -> Result<u8, CmdError> {
    let text = fs::read_to_string(input)
        .map_err(|e| CmdError { code: 2, message: format!("{}: {e}", input.display()) })?;
    let report = VerificationReport::from_json(&text)?;
    let rendered = render(&report, format)?;
    print!("{rendered}");
    if let Some(path) = out {
        write_file(path, &rendered)?;
    }
    Ok(if report.all_pass() { 0 } else { 1 })
}

fn render(report: &VerificationReport, format: Format) -> Result<String, CmdError> {
    Ok(match format {
        Format::Json => format!("{}\n", report.to_json()?),
        Format::Csv => report.to_csv(),
        Format::Text => report.to_text(),
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CmdError> {
    fs::write(path, contents)
        .map_err(|e| CmdError { code: 2, message: format!("{}: {e}", path.display()) })
}
