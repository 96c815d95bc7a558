//! Command-line front end: critical tables, measure counts and enumerations,
//! scalar-polynomial roots, and the full verification battery.
//!
//! Exit codes: 0 all assertions pass, 1 verification/assertion failure,
//! 2 usage or configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use potts_tisgm::critical::{coincidence_warnings, critical_temperatures};
use potts_tisgm::enumerate::{
    count_tisgm_with, descriptor_records, enumerate_tisgm_with,
};
use potts_tisgm::model::{theta_from_temperature, PottsParams};
use potts_tisgm::oracle::{run_verification, sig12, VerifyConfig};
use potts_tisgm::recursion::solve_phi_with;
use potts_tisgm::tol::Tolerances;
use potts_tisgm::PottsError;

#[derive(Parser)]
#[command(
    name = "tisgm",
    version,
    about = "Translation-invariant splitting Gibbs measures of the ferromagnetic \
             Potts model on a Cayley tree"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Critical transfer weights θ_m and temperatures T_{c,m}
    Critical(CriticalArgs),
    /// Exact number of measures at the given temperature
    Count(PointArgs),
    /// Canonical list of all measures at the given temperature
    Enumerate(PointArgs),
    /// Positive roots of the scalar fixed-point polynomial for one block size
    Roots(RootsArgs),
    /// Exhaustive finite-volume verification battery
    Verify(VerifyArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Spin states (q >= 2)
    #[arg(long)]
    q: usize,
    /// Tree order (k >= 2)
    #[arg(long)]
    k: usize,
}

#[derive(Args)]
struct ThetaArgs {
    /// Transfer weight θ as a decimal literal (parsed exactly)
    #[arg(long, conflicts_with_all = ["coupling", "temperature"])]
    theta: Option<String>,
    /// Coupling J > 0; use together with --T
    #[arg(long = "J", requires = "temperature")]
    coupling: Option<f64>,
    /// Temperature T > 0; use together with --J
    #[arg(long = "T", requires = "coupling")]
    temperature: Option<f64>,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the output to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TolAr {
    /// Override the relative root-refinement tolerance
    #[arg(long = "tol-root")]
    tol_root: Option<f64>,
    /// Override the relative θ-boundary comparison tolerance
    #[arg(long = "tol-boundary")]
    tol_boundary: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Args)]
struct CriticalArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Coupling J for the temperature column
    #[arg(long = "J", default_value_t = 1.0)]
    coupling: f64,
    #[command(flatten)]
    output: OutputArgs,
    #[command(flatten)]
    tols: TolAr,
}

#[derive(Args)]
struct PointArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    theta: ThetaArgs,
    #[command(flatten)]
    output: OutputArgs,
    #[command(flatten)]
    tols: TolAr,
}

#[derive(Args)]
struct RootsArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    theta: ThetaArgs,
    /// Block size m (1 <= m <= q-1)
    #[arg(long)]
    m: usize,
    #[command(flatten)]
    output: OutputArgs,
    #[command(flatten)]
    tols: TolAr,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    theta: ThetaArgs,
    /// Volume depth n for the exhaustive checks
    #[arg(long, default_value_t = 2)]
    depth: usize,
    /// Number of multi-start samples
    #[arg(long, default_value_t = 5000)]
    starts: usize,
    /// RNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
    #[command(flatten)]
    tols: TolAr,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Critical(args) => cmd_critical(args),
        Command::Count(args) => cmd_count(args),
        Command::Enumerate(args) => cmd_enumerate(args),
        Command::Roots(args) => cmd_roots(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                PottsError::InvalidParameter(_) | PottsError::SizeGuard(_) => ExitCode::from(2),
                PottsError::NumericalAnomaly(_) | PottsError::CountMismatch { .. } => {
                    ExitCode::from(1)
                }
            }
        }
    }
}

fn tolerances(args: &TolAr) -> Tolerances {
    let mut tols = Tolerances::default();
    if let Some(root) = args.tol_root {
        tols.root_rel = root;
    }
    if let Some(boundary) = args.tol_boundary {
        tols.boundary_rel = boundary;
    }
    tols
}

/// Exact rational value of a plain decimal literal; scientific notation and
/// anything non-decimal fall back to float-only handling.
fn parse_decimal_exact(text: &str) -> Option<BigRational> {
    let body = text.strip_prefix('+').unwrap_or(text);
    if body.is_empty() || body.starts_with('-') {
        return None;
    }
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits: String = format!("{int_part}{frac_part}");
    let numerator: BigInt = digits.parse().ok()?;
    let denominator = BigInt::from(10u32).pow(frac_part.len() as u32);
    Some(BigRational::new(numerator, denominator))
}

struct ResolvedTheta {
    theta: f64,
    exact: Option<BigRational>,
    coupling: f64,
}

fn resolve_theta(args: &ThetaArgs) -> Result<ResolvedTheta, PottsError> {
    match (&args.theta, args.coupling, args.temperature) {
        (Some(text), None, None) => {
            let theta: f64 = text.trim().parse().map_err(|_| {
                PottsError::InvalidParameter(format!("cannot parse theta {text:?}"))
            })?;
            Ok(ResolvedTheta { theta, exact: parse_decimal_exact(text.trim()), coupling: 1.0 })
        }
        (None, Some(j), Some(t)) => {
            let theta = theta_from_temperature(j, t)?;
            Ok(ResolvedTheta { theta, exact: None, coupling: j })
        }
        _ => Err(PottsError::InvalidParameter(
            "specify exactly one of --theta or the pair --J --T".into(),
        )),
    }
}

fn emit(output: &OutputArgs, text: &str) -> Result<(), PottsError> {
    let mut body = text.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match &output.out {
        Some(path) => std::fs::write(path, body).map_err(|e| {
            PottsError::InvalidParameter(format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct CriticalRow {
    m: usize,
    x_star: f64,
    theta_m: f64,
    #[serde(rename = "T_cm")]
    t_cm: f64,
}

#[derive(Serialize)]
struct CriticalTable {
    q: usize,
    k: usize,
    #[serde(rename = "J")]
    coupling: f64,
    points: Vec<CriticalRow>,
    theta_c: f64,
    #[serde(rename = "T_cr")]
    t_cr: f64,
    warnings: Vec<String>,
}

#[derive(Serialize)]
struct CountOut {
    regime: String,
    count: u64,
}

fn cmd_critical(args: CriticalArgs) -> Result<ExitCode, PottsError> {
    if args.coupling <= 0.0 {
        return Err(PottsError::InvalidParameter("--J must be positive".into()));
    }
    // θ plays no role in the table; any valid value satisfies the constructor.
    let params =
        PottsParams::with_theta_and_coupling(args.model.q, args.model.k, 2.0, args.coupling)?;
    let points = critical_temperatures(&params)?;
    let warnings = coincidence_warnings(&points, &params);
    let theta_c = params.theta_critical();
    let t_cr = params.t_cr();
    let text = match args.output.format {
        Format::Json => {
            let table = CriticalTable {
                q: params.q(),
                k: params.k(),
                coupling: args.coupling,
                points: points
                    .iter()
                    .map(|p| CriticalRow {
                        m: p.m,
                        x_star: p.x_star,
                        theta_m: p.theta_m,
                        t_cm: p.t_cm,
                    })
                    .collect(),
                theta_c,
                t_cr,
                warnings: warnings.clone(),
            };
            serde_json::to_string(&table).expect("static schema serializes")
        }
        Format::Tsv => {
            let mut lines = vec!["m\tx_star\ttheta_m\tT_cm".to_string()];
            for p in &points {
                lines.push(format!(
                    "{}\t{}\t{}\t{}",
                    p.m,
                    sig12(p.x_star),
                    sig12(p.theta_m),
                    sig12(p.t_cm)
                ));
            }
            lines.push(format!("cr\t\t{}\t{}", sig12(theta_c), sig12(t_cr)));
            for w in &warnings {
                lines.push(format!("# warning: {w}"));
            }
            lines.join("\n")
        }
    };
    emit(&args.output, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_count(args: PointArgs) -> Result<ExitCode, PottsError> {
    let resolved = resolve_theta(&args.theta)?;
    let params = PottsParams::with_theta_and_coupling(
        args.model.q,
        args.model.k,
        resolved.theta,
        resolved.coupling,
    )?;
    let tols = tolerances(&args.tols);
    let classification = count_tisgm_with(&params, resolved.exact.as_ref(), &tols)?;
    let text = match args.output.format {
        Format::Json => serde_json::to_string(&CountOut {
            regime: classification.regime.to_string(),
            count: classification.count,
        })
        .expect("static schema serializes"),
        Format::Tsv => {
            format!("regime\tcount\n{}\t{}", classification.regime, classification.count)
        }
    };
    emit(&args.output, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_enumerate(args: PointArgs) -> Result<ExitCode, PottsError> {
    let resolved = resolve_theta(&args.theta)?;
    let params = PottsParams::with_theta_and_coupling(
        args.model.q,
        args.model.k,
        resolved.theta,
        resolved.coupling,
    )?;
    let tols = tolerances(&args.tols);
    let classification = count_tisgm_with(&params, resolved.exact.as_ref(), &tols)?;
    let measures = enumerate_tisgm_with(&params, resolved.exact.as_ref(), &tols)?;
    let records = descriptor_records(&measures, classification.regime);
    let text = match args.output.format {
        Format::Json => serde_json::to_string(&records).expect("records serialize"),
        Format::Tsv => {
            let mut lines = vec!["M\tzstar\tm\tregime".to_string()];
            for r in &records {
                let set = r.set.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
                lines.push(format!("{set}\t{}\t{}\t{}", sig12(r.zstar), r.m, r.regime));
            }
            lines.join("\n")
        }
    };
    emit(&args.output, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_roots(args: RootsArgs) -> Result<ExitCode, PottsError> {
    let resolved = resolve_theta(&args.theta)?;
    let params = PottsParams::with_theta_and_coupling(
        args.model.q,
        args.model.k,
        resolved.theta,
        resolved.coupling,
    )?;
    let tols = tolerances(&args.tols);
    let set = solve_phi_with(args.m, &params, &tols)?;
    let text = match args.output.format {
        Format::Json => {
            // Flat list of root values, each repeated by its multiplicity.
            let mut xs: Vec<f64> = Vec::new();
            for root in set.iter() {
                for _ in 0..root.multiplicity {
                    xs.push(root.x);
                }
            }
            serde_json::to_string(&xs).expect("numbers serialize")
        }
        Format::Tsv => {
            let mut lines = vec!["x\tmultiplicity".to_string()];
            for root in set.iter() {
                lines.push(format!("{}\t{}", sig12(root.x), root.multiplicity));
            }
            lines.join("\n")
        }
    };
    emit(&args.output, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, PottsError> {
    let resolved = resolve_theta(&args.theta)?;
    let params = PottsParams::with_theta_and_coupling(
        args.model.q,
        args.model.k,
        resolved.theta,
        resolved.coupling,
    )?;
    let cfg = VerifyConfig {
        depth: args.depth,
        starts: args.starts,
        seed: args.seed,
        tols: tolerances(&args.tols),
    };
    let report = run_verification(&params, resolved.exact.as_ref(), &cfg)?;
    let text = match args.output.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes"),
        Format::Tsv => {
            let mut lines = vec!["check\tresidual\ttolerance\tpass".to_string()];
            for c in &report.checks {
                lines.push(format!("{}\t{}\t{}\t{}", c.name, c.residual, c.tolerance, c.pass));
            }
            lines.push(format!("all_pass\t\t\t{}", report.all_pass));
            lines.join("\n")
        }
    };
    emit(&args.output, &text)?;
    if report.all_pass {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}
