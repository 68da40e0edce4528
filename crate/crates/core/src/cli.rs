//! Command-line front end: argument parsing, run configuration, dispatch to
//! the pipelines and artifact emission.

use crate::conformal::{compute_riemann_map, verify_koebe, KoebeOptions, KoebeReport};
use crate::counterexample::{assemble_domain, counterexample_report, phi_file, ReportOptions, MAX_ASSEMBLY_DEPTH};
use crate::crosscut::{
    build_crosscuts, build_extension, select_n0, series_check, sobolev_energy, BoundaryParam, Cycle, DyadicFamily,
    EnergyReport, ExtensionOptions, ParamFile, SeriesReport, Verdict,
};
use crate::error::Error;
use crate::geometry::{DomainFile, JordanDomain, Point};
use crate::metrics::{integrate_criterion, integrate_hyperbolic_criterion, quasihyperbolic_field, MetricGrid};
use crate::svg::{domain_svg, field_svg};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Version of every JSON document written by the tool.
pub const SCHEMA_VERSION: u32 = 1;
/// The only environment variable read: size of the worker pool.
pub const THREADS_ENV: &str = "JORDAN_EXT_THREADS";

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    Validation = 2,
    Numerical = 3,
    Inconclusive = 4,
}

#[derive(Debug, Parser)]
#[command(name = "jordan-ext", version, about = "Metrics, crosscut extensions and the tree counterexample for planar Jordan domains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quasihyperbolic distance field dumped as CSV.
    Metric(MetricArgs),
    /// Integral of the distance from z0 to the power q.
    Criterion(CriterionArgs),
    /// Numerical Riemann map with a Koebe distortion check.
    Riemann(RiemannArgs),
    /// Crosscut series, extension mesh and Sobolev energy.
    Extend(ExtendArgs),
    /// Truncated tree domain with its verification report.
    Counterexample(CounterexampleArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Seed for every sampled verification.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Exit with status 4 unless the run reaches a conclusive positive verdict.
    #[arg(long = "assert")]
    pub assert_verdict: bool,
    /// JSON report destination; the report is also printed to stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    #[arg(long)]
    pub domain: PathBuf,
    #[arg(long, allow_hyphen_values = true, default_value = "0,0")]
    pub z0: String,
    #[arg(long)]
    pub h: f64,
    /// Field CSV destination.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CriterionArgs {
    #[arg(long)]
    pub domain: PathBuf,
    #[arg(long, allow_hyphen_values = true, default_value = "0,0")]
    pub z0: String,
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    #[arg(long)]
    pub h: f64,
    /// Use the hyperbolic distance through a Riemann map instead of the
    /// quasihyperbolic field.
    #[arg(long)]
    pub pullback: bool,
    #[arg(long, default_value_t = 512)]
    pub n_boundary: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct RiemannArgs {
    #[arg(long)]
    pub domain: PathBuf,
    #[arg(long, allow_hyphen_values = true, default_value = "0,0")]
    pub z0: String,
    #[arg(long, default_value_t = 512)]
    pub n_boundary: usize,
    #[arg(long, default_value_t = 1000)]
    pub pairs: usize,
    /// Map JSON destination.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ExtendArgs {
    #[arg(long)]
    pub domain: PathBuf,
    /// Boundary parametrization; defaults to the boundary values of the
    /// Riemann map.
    #[arg(long)]
    pub phi: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true, default_value = "0,0")]
    pub z0: String,
    #[arg(long, default_value_t = 1.5)]
    pub p: f64,
    #[arg(long = "nmax", default_value_t = 10)]
    pub n_max: u32,
    #[arg(long, default_value_t = 512)]
    pub n_boundary: usize,
    /// Extension mesh CSV destination.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CounterexampleArgs {
    #[arg(long, default_value_t = 4)]
    pub depth: u32,
    /// Domain JSON destination.
    #[arg(long)]
    pub emit: Option<PathBuf>,
    /// Boundary parametrization JSON destination.
    #[arg(long = "emit-phi")]
    pub emit_phi: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Skip the grid shortest-path cross-check.
    #[arg(long)]
    pub no_grid_check: bool,
    #[command(flatten)]
    pub common: Common,
}

/// Output destinations of a run.
#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct Outputs {
    pub report: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub mesh: Option<PathBuf>,
    pub emit: Option<PathBuf>,
    pub emit_phi: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

/// Everything a run depends on; embedded verbatim in every JSON output.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunConfig {
    pub subcommand: String,
    pub domain: Option<PathBuf>,
    pub phi: Option<PathBuf>,
    pub z0: [f64; 2],
    pub q: f64,
    pub p: f64,
    pub h: Option<f64>,
    pub n_max: u32,
    pub depth: u32,
    pub n_boundary: usize,
    pub pairs: usize,
    pub pullback: bool,
    pub grid_check: bool,
    pub assert_verdict: bool,
    pub outputs: Outputs,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            subcommand: String::new(),
            domain: None,
            phi: None,
            z0: [0.0, 0.0],
            q: 1.0,
            p: 1.5,
            h: None,
            n_max: 10,
            depth: 4,
            n_boundary: 512,
            pairs: 1000,
            pullback: false,
            grid_check: true,
            assert_verdict: false,
            outputs: Outputs::default(),
            seed: 1,
        }
    }
}

/// Failure of a run with its exit status.
#[derive(Debug)]
pub struct RunError {
    pub exit: Exit,
    pub kind: &'static str,
    pub message: String,
}

impl RunError {
    fn validation(message: impl Into<String>) -> Self {
        Self {
            exit: Exit::Validation,
            kind: "validation",
            message: message.into(),
        }
    }

    /// Machine-readable diagnostic.
    pub fn to_json(&self) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "error": self.kind,
            "exit_code": self.exit as i32,
            "message": self.message,
        })
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        let (exit, kind) = match &e {
            Error::Numerical { .. } => (Exit::Numerical, "numerical"),
            Error::Construction(_) => (Exit::Numerical, "construction"),
            Error::Io(_) => (Exit::Validation, "io"),
            Error::Json(_) => (Exit::Validation, "json"),
            _ => (Exit::Validation, "validation"),
        };
        Self {
            exit,
            kind,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e).into()
    }
}

impl From<serde_json::Error> for RunError {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e).into()
    }
}

type RunResult<T> = std::result::Result<T, RunError>;

/// Parses `"x,y"`.
pub fn parse_point(s: &str) -> RunResult<[f64; 2]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [x, y] = parts[..] else {
        return Err(RunError::validation(format!("expected a point 'x,y', got '{s}'")));
    };
    let parse = |t: &str| {
        t.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| RunError::validation(format!("invalid coordinate '{t}' in '{s}'")))
    };
    Ok([parse(x)?, parse(y)?])
}

impl RunConfig {
    pub fn from_command(cmd: Command) -> RunResult<Self> {
        let d = RunConfig::default();
        let cfg = match cmd {
            Command::Metric(a) => RunConfig {
                subcommand: "metric".into(),
                domain: Some(a.domain),
                z0: parse_point(&a.z0)?,
                h: Some(a.h),
                assert_verdict: a.common.assert_verdict,
                seed: a.common.seed,
                outputs: Outputs {
                    report: a.common.report,
                    out: a.out,
                    svg: a.svg,
                    ..Default::default()
                },
                ..d
            },
            Command::Criterion(a) => RunConfig {
                subcommand: "criterion".into(),
                domain: Some(a.domain),
                z0: parse_point(&a.z0)?,
                q: a.q,
                h: Some(a.h),
                pullback: a.pullback,
                n_boundary: a.n_boundary,
                assert_verdict: a.common.assert_verdict,
                seed: a.common.seed,
                outputs: Outputs {
                    report: a.common.report,
                    ..Default::default()
                },
                ..d
            },
            Command::Riemann(a) => RunConfig {
                subcommand: "riemann".into(),
                domain: Some(a.domain),
                z0: parse_point(&a.z0)?,
                n_boundary: a.n_boundary,
                pairs: a.pairs,
                assert_verdict: a.common.assert_verdict,
                seed: a.common.seed,
                outputs: Outputs {
                    report: a.common.report,
                    out: a.out,
                    ..Default::default()
                },
                ..d
            },
            Command::Extend(a) => RunConfig {
                subcommand: "extend".into(),
                domain: Some(a.domain),
                phi: a.phi,
                z0: parse_point(&a.z0)?,
                p: a.p,
                n_max: a.n_max,
                n_boundary: a.n_boundary,
                assert_verdict: a.common.assert_verdict,
                seed: a.common.seed,
                outputs: Outputs {
                    report: a.common.report,
                    mesh: a.mesh,
                    ..Default::default()
                },
                ..d
            },
            Command::Counterexample(a) => RunConfig {
                subcommand: "counterexample".into(),
                depth: a.depth,
                grid_check: !a.no_grid_check,
                assert_verdict: a.common.assert_verdict,
                seed: a.common.seed,
                outputs: Outputs {
                    report: a.common.report,
                    emit: a.emit,
                    emit_phi: a.emit_phi,
                    svg: a.svg,
                    ..Default::default()
                },
                ..d
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks exponents, spacing and paths.
    pub fn validate(&self) -> RunResult<()> {
        if !(1.0..2.0).contains(&self.p) {
            return Err(RunError::validation(format!("p must lie in [1, 2), got {}", self.p)));
        }
        if !(self.q >= 1.0 && self.q.is_finite()) {
            return Err(RunError::validation(format!("q must be at least 1, got {}", self.q)));
        }
        if let Some(h) = self.h {
            if !(h > 0.0 && h.is_finite()) {
                return Err(RunError::validation(format!("h must be positive, got {h}")));
            }
        }
        if self.subcommand == "counterexample" && !(1..=MAX_ASSEMBLY_DEPTH).contains(&self.depth) {
            return Err(RunError::validation(format!(
                "depth must lie in 1..={MAX_ASSEMBLY_DEPTH}, got {}",
                self.depth
            )));
        }
        for input in self.domain.iter().chain(&self.phi) {
            if !input.is_file() {
                return Err(RunError::validation(format!("input file {} not found", input.display())));
            }
        }
        let o = &self.outputs;
        for out in [&o.report, &o.out, &o.mesh, &o.emit, &o.emit_phi, &o.svg].into_iter().flatten() {
            let parent = out.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
            if !parent.is_dir() {
                return Err(RunError::validation(format!(
                    "output directory {} does not exist",
                    parent.display()
                )));
            }
        }
        Ok(())
    }

    fn z0(&self) -> Point {
        Point::new(self.z0[0], self.z0[1])
    }

    fn load_domain(&self) -> RunResult<Arc<JordanDomain>> {
        let path = self.domain.as_ref().ok_or_else(|| RunError::validation("--domain is required"))?;
        let file: DomainFile = serde_json::from_reader(std::io::BufReader::new(File::open(path)?))?;
        Ok(Arc::new(JordanDomain::from_file(&file)?))
    }

    /// Wraps a report with the schema version and this configuration.
    pub fn envelope<T: Serialize>(&self, body: &T) -> RunResult<Value> {
        let mut v = serde_json::to_value(body)?;
        let Value::Object(map) = &mut v else {
            return Err(RunError::validation("report is not a JSON object"));
        };
        map.insert("schema_version".into(), json!(SCHEMA_VERSION));
        map.insert("config".into(), serde_json::to_value(self)?);
        Ok(v)
    }
}

/// Result of a successful dispatch.
#[derive(Debug)]
pub struct RunOutcome {
    pub exit: Exit,
    /// Enveloped report, also written to `--report` when given.
    pub report: Value,
}

fn write_json(path: &Path, v: &Value) -> RunResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, v)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn write_text(path: &Path, s: &str) -> RunResult<()> {
    std::fs::write(path, s)?;
    Ok(())
}

fn verdict(ok: bool, cfg: &RunConfig) -> Exit {
    if cfg.assert_verdict && !ok {
        Exit::Inconclusive
    } else {
        Exit::Success
    }
}

/// Runs one subcommand and writes its artifacts.
pub fn run(cfg: &RunConfig) -> RunResult<RunOutcome> {
    cfg.validate()?;
    let (body, ok) = match cfg.subcommand.as_str() {
        "metric" => run_metric(cfg)?,
        "criterion" => run_criterion(cfg)?,
        "riemann" => run_riemann(cfg)?,
        "extend" => run_extend(cfg)?,
        "counterexample" => run_counterexample(cfg)?,
        other => return Err(RunError::validation(format!("unknown subcommand '{other}'"))),
    };
    let report = cfg.envelope(&body)?;
    if let Some(path) = &cfg.outputs.report {
        write_json(path, &report)?;
    }
    Ok(RunOutcome {
        exit: verdict(ok, cfg),
        report,
    })
}

/// Grid spacing, with a warning when it is coarser than the domain's hint.
fn grid_spacing(cfg: &RunConfig, domain: &JordanDomain) -> RunResult<f64> {
    let h = cfg.h.ok_or_else(|| RunError::validation("--h is required"))?;
    if h > domain.resolution_hint() {
        eprintln!(
            "warning: h = {h} exceeds the domain resolution hint {}",
            domain.resolution_hint()
        );
    }
    Ok(h)
}

fn run_metric(cfg: &RunConfig) -> RunResult<(Value, bool)> {
    let domain = cfg.load_domain()?;
    let h = grid_spacing(cfg, &domain)?;
    let grid = MetricGrid::build(domain, h)?;
    let field = quasihyperbolic_field(&grid, cfg.z0())?;
    if let Some(path) = &cfg.outputs.out {
        field.write_csv(BufWriter::new(File::create(path)?))?;
    }
    if let Some(path) = &cfg.outputs.svg {
        write_text(path, &field_svg(&field))?;
    }
    let finite = field.values().iter().copied().filter(|v| v.is_finite());
    let max = finite.fold(0.0f64, f64::max);
    let reached = field.reached_count();
    Ok((
        json!({
            "nodes": grid.len(),
            "reached": reached,
            "unreached": grid.len() - reached,
            "max_value": max,
        }),
        reached == grid.len(),
    ))
}

fn run_criterion(cfg: &RunConfig) -> RunResult<(Value, bool)> {
    let domain = cfg.load_domain()?;
    let h = grid_spacing(cfg, &domain)?;
    let report = if cfg.pullback {
        let map = compute_riemann_map(domain, cfg.z0(), cfg.n_boundary)?;
        integrate_hyperbolic_criterion(&map, cfg.z0(), h, cfg.q)?
    } else {
        let grid = MetricGrid::build(domain, h)?;
        integrate_criterion(&quasihyperbolic_field(&grid, cfg.z0())?, cfg.q)?
    };
    let ok = report.converged;
    Ok((serde_json::to_value(report)?, ok))
}

#[derive(Serialize)]
struct RiemannBody {
    center: [f64; 2],
    n_boundary: usize,
    table_len: usize,
    center_residual: f64,
    koebe: KoebeReport,
}

fn run_riemann(cfg: &RunConfig) -> RunResult<(Value, bool)> {
    let domain = cfg.load_domain()?;
    let map = compute_riemann_map(domain, cfg.z0(), cfg.n_boundary)?;
    let koebe = verify_koebe(
        &map,
        &KoebeOptions {
            pairs: cfg.pairs,
            seed: cfg.seed,
            max_distance: None,
        },
    )?;
    if let Some(path) = &cfg.outputs.out {
        write_json(path, &cfg.envelope(&map.to_file())?)?;
    }
    let ok = koebe.violations == 0;
    let body = RiemannBody {
        center: cfg.z0,
        n_boundary: map.n_boundary(),
        table_len: map.table_len(),
        center_residual: map.center_residual(),
        koebe,
    };
    Ok((serde_json::to_value(body)?, ok))
}

#[derive(Serialize)]
struct ExtendBody {
    n0: u32,
    separation_level: u32,
    series: SeriesReport,
    cells: usize,
    degenerate_cells: usize,
    boundary_vertex_error: f64,
    boundary_midpoint_error: f64,
    max_displacement: f64,
    energy: EnergyReport,
}

/// Points seeding the starting level: sixteen equally spaced angles.
const SEED_CYCLE: usize = 16;

fn run_extend(cfg: &RunConfig) -> RunResult<(Value, bool)> {
    let domain = cfg.load_domain()?;
    let map = Arc::new(compute_riemann_map(domain.clone(), cfg.z0(), cfg.n_boundary)?);
    let phi = match &cfg.phi {
        Some(path) => {
            let file: ParamFile = serde_json::from_reader(std::io::BufReader::new(File::open(path)?))?;
            BoundaryParam::from_file(domain, &file)?
        }
        None => BoundaryParam::from_map(&map),
    };
    let sel = select_n0(&phi, &map, &Cycle::uniform(SEED_CYCLE)?, 0.0, cfg.n_max)?;
    let family = DyadicFamily::new(sel.n0, cfg.n_max, 0.0)?;
    let system = build_crosscuts(family, phi, map)?;
    let series = series_check(&system, cfg.p)?;
    let mesh = build_extension(&system, &ExtensionOptions::default())?;
    if let Some(path) = &cfg.outputs.mesh {
        mesh.write_csv(BufWriter::new(File::create(path)?))?;
    }
    let energy = sobolev_energy(&mesh, cfg.p)?;
    let ok = series.verdict == Verdict::Convergent && mesh.degenerate_cells() == 0;
    let body = ExtendBody {
        n0: sel.n0,
        separation_level: sel.separation_level,
        cells: mesh.cells.len(),
        degenerate_cells: mesh.degenerate_cells(),
        boundary_vertex_error: mesh.boundary_vertex_error,
        boundary_midpoint_error: mesh.boundary_midpoint_error,
        max_displacement: mesh.max_displacement(),
        series,
        energy,
    };
    Ok((serde_json::to_value(body)?, ok))
}

fn run_counterexample(cfg: &RunConfig) -> RunResult<(Value, bool)> {
    let cd = assemble_domain(cfg.depth, None)?;
    let opts = ReportOptions {
        grid_check: cfg.grid_check,
        seed: cfg.seed,
        ..Default::default()
    };
    let report = counterexample_report(&cd, &opts)?;
    if let Some(path) = &cfg.outputs.emit {
        write_json(path, &cfg.envelope(&cd.domain.to_file())?)?;
    }
    if let Some(path) = &cfg.outputs.emit_phi {
        write_json(path, &cfg.envelope(&phi_file(&cd))?)?;
    }
    if let Some(path) = &cfg.outputs.svg {
        let outline = crate::counterexample::report::outline(&cd);
        write_text(path, &domain_svg(&outline, Some(cd.tree.p0)))?;
    }
    let a = &report.anchors;
    let ok = a.left_chain
        && a.right_chain
        && a.interior
        && a.top_closes
        && report.distance_check.report.within_band
        && report.integrability.pass
        && report.blowup.grid_check.as_ref().is_none_or(|g| g.consistent);
    Ok((serde_json::to_value(report)?, ok))
}

/// Sizes the global worker pool from the environment.
pub fn configure_threads() -> RunResult<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| RunError::validation(format!("{THREADS_ENV} must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| RunError::validation(e.to_string()))
}

/// Entry point shared by the binary: parse, run, print, and map to an exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Exit::Validation as i32 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = configure_threads()
        .and_then(|_| RunConfig::from_command(cli.command))
        .and_then(|cfg| run(&cfg));
    match outcome {
        Ok(o) => {
            let text = serde_json::to_string_pretty(&o.report).unwrap_or_default();
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            o.exit as i32
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit as i32
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_parse() {
        assert_eq!(parse_point("0,0").unwrap(), [0.0, 0.0]);
        assert_eq!(parse_point(" -0.5, 1e-3").unwrap(), [-0.5, 1e-3]);
        assert!(parse_point("1").is_err());
        assert!(parse_point("1,2,3").is_err());
        assert!(parse_point("a,2").is_err());
        assert!(parse_point("nan,2").is_err());
    }

    #[test]
    fn invariants_are_enforced() {
        let base = RunConfig {
            subcommand: "counterexample".into(),
            ..Default::default()
        };
        assert!(base.validate().is_ok());
        for bad in [
            RunConfig { p: 2.0, ..base.clone() },
            RunConfig { p: 0.9, ..base.clone() },
            RunConfig { q: 0.5, ..base.clone() },
            RunConfig { h: Some(0.0), ..base.clone() },
            RunConfig { depth: 7, ..base.clone() },
            RunConfig {
                domain: Some("/nonexistent/d.json".into()),
                ..base.clone()
            },
        ] {
            let e = bad.validate().unwrap_err();
            assert_eq!(e.exit, Exit::Validation);
        }
    }

    #[test]
    fn errors_map_to_exit_codes() {
        let num: RunError = Error::Numerical {
            iterations: 3,
            residual: 1.0,
            reason: "x".into(),
        }
        .into();
        assert_eq!(num.exit, Exit::Numerical);
        assert_eq!(num.to_json()["exit_code"], 3);
        let val: RunError = Error::NoInteriorNodes { h: 1.0 }.into();
        assert_eq!(val.exit, Exit::Validation);
    }

    #[test]
    fn envelope_carries_config() {
        let cfg = RunConfig {
            subcommand: "criterion".into(),
            seed: 9,
            ..Default::default()
        };
        let v = cfg.envelope(&json!({"estimate": 1.0})).unwrap();
        assert_eq!(v["schema_version"], SCHEMA_VERSION);
        assert_eq!(v["config"]["seed"], 9);
        assert_eq!(v["estimate"], 1.0);
        assert!(cfg.envelope(&1.0).is_err());
    }
}
