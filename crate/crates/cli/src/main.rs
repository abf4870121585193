//! `besselkit`: kernel grids, Fourier–Bessel transforms and audit suites.
//!
//! Exit codes: 0 when everything requested succeeded (and every audit
//! passed), 2 for usage and configuration errors, 3 for numerical
//! non-convergence or a failed audit.

mod config;
mod grid;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;
use std::thread;

use besselkit_core::audit::{aggregate_pass, powerlaw_budget, run_suite, AuditConfig, AuditReport, SUITES};
use besselkit_core::fbt::fb_numeric;
use besselkit_core::field::{Bump, PowerLawField};
use besselkit_core::{Error, GaussPoly, KernelFamily, KernelSpec, PositivePoint, QuadSpec, ScalarField};
use clap::{Parser, Subcommand};
use serde::Serialize;

use config::{CommonArgs, ConfigEcho, Merged};
use grid::{parse_grid, tensor_points, write_csv};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::NonConvergence { .. }) => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "besselkit", version, about = "Bessel harmonic-analysis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a kernel (e, s or r) on a grid and write CSV
    Eval {
        /// Kernel family: e, s or r
        #[arg(long)]
        kernel: Option<String>,
        /// Axes `start:stop:count` separated by `;`
        #[arg(long)]
        grid: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Numerical Fourier–Bessel transform of a built-in field, as CSV
    Transform {
        /// gaussian(width), powerlaw(alpha) or bump(center,width)
        #[arg(long)]
        field: Option<String>,
        /// Axes `start:stop:count` separated by `;`
        #[arg(long)]
        grid: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run audit suites and write a JSON report
    Audit {
        /// Suite ids, comma separated, or `all`
        #[arg(long)]
        suite: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

const DEFAULT_GRID: &str = "0.25:2:8";

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval { kernel, grid, common } => cmd_eval(kernel, grid, common),
        Command::Transform { field, grid, common } => cmd_transform(field, grid, common),
        Command::Audit { suite, common } => cmd_audit(suite, common),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("besselkit: {}", e.to_string().replace('\n', " "));
            ExitCode::from(e.exit_code())
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io { path: "stdout".into(), source }),
    }
}

/// Evaluate `f` at every point on scoped threads; order follows `points`.
fn par_map<T: Send>(points: &[Vec<f64>], f: impl Fn(&[f64]) -> T + Sync) -> Vec<T> {
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(points.len().max(1));
    let chunk = points.len().div_ceil(workers).max(1);
    thread::scope(|s| {
        let handles: Vec<_> = points.chunks(chunk).map(|c| s.spawn(|| c.iter().map(|p| f(p)).collect::<Vec<T>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("grid worker panicked")).collect()
    })
}

fn cmd_eval(kernel: Option<String>, grid: Option<String>, common: CommonArgs) -> Result<u8, CliError> {
    let merged = Merged::new(common)?;
    let problem = merged.problem()?;
    let name = merged.text("kernel", kernel.as_deref()).ok_or_else(|| CliError::Usage("--kernel is required".into()))?;
    let (family, order) = match name.to_ascii_lowercase().as_str() {
        "e" => (KernelFamily::E, 1),
        "s" => (KernelFamily::S, problem.k),
        "r" => (KernelFamily::R, problem.k),
        other => return Err(CliError::Usage(format!("unknown kernel `{other}`; expected e, s or r"))),
    };
    let spec = KernelSpec::new(family, order, problem.v.clone(), Some(problem.split))?;
    if let Some(arg) = &spec.degenerate {
        return Err(CliError::Usage(format!("kernel constant is degenerate (Gamma pole at {arg}) for these parameters")));
    }
    let axes = parse_grid(&merged.text("grid", grid.as_deref()).unwrap_or_else(|| DEFAULT_GRID.into()), problem.n)?;
    let points = tensor_points(&axes);
    let values = par_map(&points, |x| PositivePoint::new(x.to_vec()).and_then(|p| spec.eval(&p)));
    let mut out = Vec::with_capacity(values.len());
    let mut outside = 0usize;
    for v in values {
        match v {
            Ok(x) => out.push(Some(x)),
            Err(Error::Domain { .. } | Error::OutsideCone(_) | Error::Singular(_)) => {
                outside += 1;
                out.push(None);
            }
            Err(e) => return Err(e.into()),
        }
    }
    if outside > 0 {
        eprintln!("besselkit: warning: {outside} grid point(s) outside the kernel's domain written as NA");
    }
    emit(merged.out().as_deref(), &write_csv(&points, &out))?;
    Ok(0)
}

/// A built-in test field together with its default budget.
fn parse_field(spec: &str, n: usize, homogeneous_dim: f64) -> Result<(Box<dyn ScalarField + Sync>, QuadSpec), CliError> {
    let bad = || CliError::Usage(format!("unknown field `{spec}`; expected gaussian(width), powerlaw(alpha) or bump(center,width)"));
    let s = spec.trim();
    let open = s.find('(').ok_or_else(bad)?;
    if !s.ends_with(')') {
        return Err(bad());
    }
    let name = s[..open].trim().to_ascii_lowercase();
    let args = config::parse_list("field", &s[open + 1..s.len() - 1])?;
    match (name.as_str(), args.as_slice()) {
        ("gaussian", [w]) if *w > 0.0 => Ok((Box::new(GaussPoly::gaussian(n, 1.0 / (w * w))?), QuadSpec::default())),
        ("powerlaw", [alpha]) if !(*alpha > 0.0 && *alpha < homogeneous_dim) => Err(CliError::Usage(format!(
            "powerlaw({alpha}) needs 0 < alpha < N = {homogeneous_dim} to be locally integrable with a transform"
        ))),
        ("powerlaw", [alpha]) => Ok((Box::new(PowerLawField { alpha: *alpha }), powerlaw_budget())),
        ("bump", [c, w]) if *w > 0.0 => {
            Ok((Box::new(Bump { center: vec![*c; n], width: *w }), QuadSpec::default().with_radius(c + 8.0 * w, 0.5 * w.min(1.0))))
        }
        _ => Err(bad()),
    }
}

fn cmd_transform(field: Option<String>, grid: Option<String>, common: CommonArgs) -> Result<u8, CliError> {
    let merged = Merged::new(common)?;
    let problem = merged.problem()?;
    let budget = merged.budget()?;
    let field_spec = merged.text("field", field.as_deref()).ok_or_else(|| CliError::Usage("--field is required".into()))?;
    let (f, default_spec) = parse_field(&field_spec, problem.n, problem.v.homogeneous_dim())?;
    let spec = budget.apply(default_spec);
    spec.validate()?;
    let axes = parse_grid(&merged.text("grid", grid.as_deref()).unwrap_or_else(|| DEFAULT_GRID.into()), problem.n)?;
    let points = tensor_points(&axes);
    let values = par_map(&points, |x| PositivePoint::new(x.to_vec()).and_then(|p| fb_numeric(f.as_ref(), &p, &problem.v, &spec)));
    let mut out = Vec::with_capacity(values.len());
    let mut outside = 0usize;
    for v in values {
        match v {
            Ok(x) => out.push(Some(x)),
            Err(Error::Domain { .. }) => {
                outside += 1;
                out.push(None);
            }
            Err(e) => return Err(e.into()),
        }
    }
    if outside > 0 {
        eprintln!("besselkit: warning: {outside} grid point(s) outside the open orthant written as NA");
    }
    emit(merged.out().as_deref(), &write_csv(&points, &out))?;
    Ok(0)
}

#[derive(Serialize)]
struct AuditDocument {
    schema_version: &'static str,
    config_echo: ConfigEcho,
    reports: Vec<AuditReport>,
    aggregate_pass: bool,
}

fn cmd_audit(suite: Option<String>, common: CommonArgs) -> Result<u8, CliError> {
    let merged = Merged::new(common)?;
    let requested = merged.text("suite", suite.as_deref()).ok_or_else(|| CliError::Usage("--suite is required".into()))?;
    let suites: Vec<String> = if requested.trim() == "all" {
        SUITES.iter().map(|s| s.to_string()).collect()
    } else {
        requested.split(',').map(|s| s.trim().to_string()).collect()
    };
    if let Some(bad) = suites.iter().find(|s| !SUITES.contains(&s.as_str())) {
        return Err(Error::UnknownSuite { name: bad.clone(), valid: SUITES.join(", ") }.into());
    }
    let problem = merged.problem()?;
    let budget = merged.budget()?;
    let cfg = AuditConfig::new(problem.v.clone(), problem.split, problem.k)?.with_budget(budget.clone())?;

    let mut reports = Vec::new();
    for s in &suites {
        reports.extend(run_suite(s, &cfg)?);
    }
    let pass = aggregate_pass(&reports);
    let doc = AuditDocument { schema_version: "1", config_echo: ConfigEcho::new(&problem, &budget, &suites), reports, aggregate_pass: pass };
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Usage(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    emit(merged.out().as_deref(), &text)?;
    if doc.reports.iter().any(AuditReport::is_non_convergence) {
        eprintln!("besselkit: numerical non-convergence; see the failing report");
    }
    Ok(if pass { 0 } else { 3 })
}
