use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::network_file::{load_network_sizes, read_network_source};
use super::output::{path_csv, to_json, trajectory_csv, write_artifact};
use crate::cone::PlusVector;
use crate::error::{Error, Result};
use crate::lyapunov::{assemble_v, run_batch, validate_models, BatchConfig, SubsystemModel};
use crate::network::{validate_network, NetworkSpec};
use crate::path::{build_path_table, verify_path, PathMode, PathTable, SideConditions};
use crate::sampling::{log_grid, points_per_decade};
use crate::scalar::ScalarFn;
use crate::stability::{
    certify_homogeneous, certify_mbi_via_uges, certify_uges_linear, check_max_robust_sgc, check_point_of_decay,
    check_sgc_sample, estimate_oplus_mbi_phi, estimate_ugs_phi, estimate_uniform_sgc_eta, simulate, Certificate,
    IterOptions, OperatorKind, Outcome, Property,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Log-spaced grid `a:b[:points]`; without a count, 17 points per decade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub a: f64,
    pub b: f64,
    pub points: Option<usize>,
}

impl GridSpec {
    pub fn new(a: f64, b: f64, points: Option<usize>) -> Result<Self> {
        if !(a > 0.0 && b >= a && b.is_finite()) {
            return Err(Error::Parse(format!("grid needs 0 < a ≤ b, got {a}:{b}")));
        }
        if points == Some(0) || (b > a && points == Some(1)) {
            return Err(Error::Parse("grid needs at least two points when a < b".into()));
        }
        Ok(GridSpec { a, b, points })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.a == self.b {
            return vec![self.a];
        }
        log_grid(self.a, self.b, self.points.unwrap_or_else(|| points_per_decade(self.a, self.b, 17)))
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| Error::Parse(format!("grid '{s}': {e}")));
        match parts.as_slice() {
            [a, b] => GridSpec::new(num(a)?, num(b)?, None),
            [a, b, p] => {
                let p = p.trim().parse::<usize>().map_err(|e| Error::Parse(format!("grid '{s}': {e}")))?;
                GridSpec::new(num(a)?, num(b)?, Some(p))
            }
            _ => Err(Error::Parse(format!("grid '{s}' must be a:b or a:b:points"))),
        }
    }
}

/// `gamma`, `gamma-hat` or `gamma-r:<r>`.
pub fn parse_operator(s: &str) -> Result<OperatorKind> {
    match s.split_once(':') {
        None if s == "gamma" => Ok(OperatorKind::Gamma),
        None if s == "gamma-hat" => Ok(OperatorKind::GammaHat),
        Some(("gamma-r", r)) => {
            let r = r.trim().parse::<f64>().map_err(|e| Error::Parse(format!("operator '{s}': {e}")))?;
            Ok(OperatorKind::GammaR { r })
        }
        _ => Err(Error::Parse(format!("unknown operator '{s}' (gamma, gamma-hat, gamma-r:<r>)"))),
    }
}

pub fn parse_property(s: &str) -> Result<Property> {
    serde_json::from_value(Value::String(s.to_string())).map_err(|_| Error::Parse(format!("unknown property '{s}'")))
}

pub fn parse_vector(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| Error::Parse(format!("vector '{s}': {e}"))))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Validate,
    /// Iterates `operator` from `start` (one value is broadcast to `t·𝟙`).
    Simulate { operator: OperatorKind, start: Vec<f64> },
    Certify { property: Property, samples: usize, k: usize, point: Option<Vec<f64>> },
    /// With `phi`, both endpoints are built and the gap is reported;
    /// `upper` selects `σ^*` for the table.
    Path { phi: Option<ScalarFn>, upper: bool },
    Lyapunov { system: PathBuf },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Simulate { .. } => "simulate",
            Command::Certify { .. } => "certify",
            Command::Path { .. } => "path",
            Command::Lyapunov { .. } => "lyapunov",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub network: PathBuf,
    pub tol: f64,
    pub kmax: usize,
    pub grid: Option<GridSpec>,
    pub seed: u64,
    /// Template sizes; empty means the file's own size.
    pub truncation: Vec<usize>,
    pub rho: Option<ScalarFn>,
    pub omega: Option<ScalarFn>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command, network: impl Into<PathBuf>) -> Self {
        let opts = IterOptions::default();
        RunConfig {
            command,
            network: network.into(),
            tol: opts.tol,
            kmax: opts.kmax,
            grid: None,
            seed: 0,
            truncation: vec![],
            rho: None,
            omega: None,
            out: None,
        }
    }

    fn opts(&self) -> IterOptions {
        IterOptions::default().with_tol(self.tol).with_kmax(self.kmax)
    }

    fn grid_or(&self, a: f64, b: f64, points: Option<usize>) -> Vec<f64> {
        self.grid.unwrap_or(GridSpec { a, b, points }).points()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub report: Value,
    pub artifacts: Vec<PathBuf>,
}

struct Run {
    exit_code: i32,
    report: Value,
    files: Vec<(String, String)>,
    table: Option<PathTable>,
}

impl Run {
    fn new(exit_code: i32, report: Value) -> Self {
        Run { exit_code, report, files: vec![], table: None }
    }

    fn file(mut self, name: &str, contents: String) -> Self {
        self.files.push((name.to_string(), contents));
        self
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn is_computation_failure(e: &Error) -> bool {
    matches!(
        e,
        Error::Construction { .. } | Error::NonConvergence { .. } | Error::Overflow { .. } | Error::Assembly(_)
    )
}

/// Runs one subcommand. `Err` is a usage, parse or input problem (exit 2);
/// computational failures are reported with exit code 1.
pub fn run_command(config: &RunConfig) -> Result<RunOutcome> {
    if !(config.tol >= 0.0) || config.kmax == 0 {
        return Err(Error::Parse("--tol must be ≥ 0 and --kmax ≥ 1".into()));
    }
    let specs: Vec<NetworkSpec> = match config.command {
        Command::Validate => {
            let source = read_network_source(&config.network)?;
            if config.truncation.is_empty() {
                vec![source.spec(None)?]
            } else {
                config.truncation.iter().map(|&m| source.spec(Some(m))).collect::<Result<_>>()?
            }
        }
        _ => load_network_sizes(&config.network, &config.truncation)?,
    };
    let system = match &config.command {
        Command::Lyapunov { system } => Some(read_system(system)?),
        _ => None,
    };
    let multi = specs.len() > 1;
    let mut runs = Vec::with_capacity(specs.len());
    for spec in &specs {
        let run = match &config.command {
            Command::Validate => run_validate(spec),
            Command::Simulate { operator, start } => run_simulate(config, spec, operator, start)?,
            Command::Certify { property, samples, k, point } => {
                run_certify(config, spec, *property, *samples, *k, point.as_deref())?
            }
            Command::Path { phi, upper } => run_path(config, spec, phi.as_ref(), *upper)?,
            Command::Lyapunov { .. } => run_lyapunov(config, spec, system.as_ref().expect("system file read above"))?,
        };
        runs.push(run);
    }

    let mut artifacts = Vec::new();
    let mut reports = Vec::with_capacity(runs.len());
    let exit_code = runs.iter().map(|r| r.exit_code).max().unwrap_or(EXIT_OK);
    for (spec, run) in specs.iter().zip(&runs) {
        if let Some(dir) = &config.out {
            for (name, contents) in &run.files {
                let name = if multi { suffixed(name, spec.n()) } else { name.clone() };
                artifacts.push(write_artifact(dir, &name, contents)?);
            }
        }
        reports.push(json!({ "n": spec.n(), "exit_code": run.exit_code, "result": run.report }));
    }
    let mut report = json!({
        "command": config.command.name(),
        "network": config.network.display().to_string(),
        "seed": config.seed,
        "tol": config.tol,
        "kmax": config.kmax,
        "runs": reports,
    });
    if matches!(config.command, Command::Path { .. }) && multi {
        let tables: Vec<(usize, &PathTable)> =
            specs.iter().zip(&runs).filter_map(|(s, r)| r.table.as_ref().map(|t| (s.n(), t))).collect();
        report["stabilization"] = to_value(&stabilization(&tables));
    }
    if let Some(dir) = &config.out {
        artifacts.push(write_artifact(dir, "report.json", &to_json(&report)?)?);
    }
    Ok(RunOutcome { exit_code, report, artifacts })
}

fn suffixed(name: &str, n: usize) -> String {
    match name.rsplit_once('.') {
        Some((stem, ext)) => format!("{stem}_n{n}.{ext}"),
        None => format!("{name}_n{n}"),
    }
}

fn run_validate(spec: &NetworkSpec) -> Run {
    let report = validate_network(spec);
    let code = if report.passed() { EXIT_OK } else { EXIT_FAILED };
    Run::new(code, json!({ "nodes": spec.n(), "edges": spec.edge_count(), "validation": to_value(&report) }))
}

fn start_vector(spec: &NetworkSpec, start: &[f64]) -> Result<PlusVector> {
    match start {
        [t] => Ok(PlusVector::constant(spec.n(), *t)),
        v if v.len() == spec.n() => PlusVector::new(v.to_vec()),
        v => Err(Error::Parse(format!("--start has {} entries for {} nodes", v.len(), spec.n()))),
    }
}

fn run_simulate(config: &RunConfig, spec: &NetworkSpec, operator: &OperatorKind, start: &[f64]) -> Result<Run> {
    let s0 = start_vector(spec, start)?;
    let tr = simulate(spec, operator, &s0, &config.opts())?;
    let code = if tr.outcome == Outcome::Overflow { EXIT_FAILED } else { EXIT_OK };
    let report = json!({
        "operator": to_value(operator),
        "outcome": to_value(&tr.outcome),
        "iterations": tr.iterations,
        "converged": tr.converged,
        "limit": to_value(&tr.limit),
        "final": to_value(&tr.states.last()),
    });
    Ok(Run::new(code, report).file("trajectory.csv", trajectory_csv(&tr.states)))
}

fn certify(config: &RunConfig, spec: &NetworkSpec, property: Property, samples: usize, k: usize, point: Option<&[f64]>) -> Result<Certificate> {
    let opts = config.opts();
    let levels = config.grid_or(1e-2, 1e2, Some(9));
    let seed = config.seed;
    match property {
        Property::Sgc => check_sgc_sample(spec, samples, seed),
        Property::UniformSgc => estimate_uniform_sgc_eta(spec, &levels, samples, seed),
        Property::OplusMbi => estimate_oplus_mbi_phi(spec, &levels, samples, &opts, seed),
        Property::Mbi => certify_mbi_via_uges(spec, config.omega.as_ref()),
        Property::Ugs => estimate_ugs_phi(spec, &OperatorKind::Gamma, &levels, samples, &opts, seed),
        Property::Uges if spec.is_linear_operator() => certify_uges_linear(spec),
        Property::Uges => certify_homogeneous(spec, config.kmax.min(10_000)),
        Property::MaxRobustSgc => {
            let omega = config.omega.as_ref().ok_or_else(|| Error::Parse("max-robust-sgc needs --omega".into()))?;
            check_max_robust_sgc(spec, omega, samples, seed)
        }
        Property::OrderContraction => {
            let g = config.grid.unwrap_or(GridSpec { a: 0.1, b: 1.0, points: None });
            crate::path::check_order_contraction(spec, k, g.a, g.b, samples, seed)
        }
        Property::PointOfDecay => {
            let p = point.ok_or_else(|| Error::Parse("point-of-decay needs --point".into()))?;
            check_point_of_decay(spec, &start_vector(spec, p)?, config.tol)
        }
        Property::Ugas => Err(Error::Parse("ugas is not available from the command line; use ugs or uges".into())),
    }
}

fn run_certify(config: &RunConfig, spec: &NetworkSpec, property: Property, samples: usize, k: usize, point: Option<&[f64]>) -> Result<Run> {
    let cert = match certify(config, spec, property, samples, k, point) {
        Ok(c) => c,
        Err(Error::WrongClass(msg)) => return Err(Error::Parse(format!("{property:?} is not applicable: {msg}"))),
        Err(e) => return Err(e),
    };
    let cert = if cert.seed.is_none() { cert.with_seed(config.seed) } else { cert };
    let code = if cert.verdict.is_failure() { EXIT_FAILED } else { EXIT_OK };
    let replayed = cert.replay(spec);
    let mut report = to_value(&cert);
    report["replayed"] = to_value(&replayed);
    let body = to_json(&cert)?;
    Ok(Run::new(code, report).file("certificate.json", body))
}

fn run_path(config: &RunConfig, spec: &NetworkSpec, phi: Option<&ScalarFn>, upper: bool) -> Result<Run> {
    if upper && phi.is_none() {
        return Err(Error::Parse("--upper needs --phi".into()));
    }
    let grid = config.grid_or(1e-2, 1e2, None);
    let mode = if upper { PathMode::SigmaUpper } else { PathMode::SigmaStar };
    let table = match build_path_table(spec, &grid, phi, &config.opts(), mode) {
        Ok(t) => t,
        Err(e) if is_computation_failure(&e) => {
            return Ok(Run::new(EXIT_FAILED, json!({ "error": e.to_string() })));
        }
        Err(e) => return Err(e),
    };
    let (a, b) = (grid[0], grid[grid.len() - 1]);
    let sub: Vec<(f64, f64)> = if b > a { vec![(a, b)] } else { vec![] };
    let verify = verify_path(spec, &table, config.rho.as_ref(), &sub, table.tol)?;
    let side = if b > a { SideConditions::compute(spec, a, b, 2, 200, config.seed).ok() } else { None };
    let code = if verify.passed() { EXIT_OK } else { EXIT_FAILED };
    let report = json!({
        "mode": to_value(&mode),
        "grid_points": grid.len(),
        "lipschitz": table.lipschitz_constant(),
        "verify": to_value(&verify),
        "passed": verify.passed(),
        "side_conditions": to_value(&side),
    });
    let mut run = Run::new(code, report).file("path.csv", path_csv(&table));
    run.table = Some(table);
    Ok(run)
}

/// Interior agreement between consecutive truncations: node `i` of the
/// smaller network is matched with node `i + (M − m)/2` of the larger, over
/// the middle half of the smaller one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stabilization {
    pub sizes: (usize, usize),
    pub compared_nodes: usize,
    pub max_difference: f64,
    pub at_r: f64,
}

pub fn stabilization(tables: &[(usize, &PathTable)]) -> Vec<Stabilization> {
    tables
        .windows(2)
        .filter_map(|w| {
            let ((m, small), (big_m, big)) = (w[0], w[1]);
            if small.grid() != big.grid() {
                return None;
            }
            let (lo, hi) = if m <= big_m { (small, big) } else { (big, small) };
            let (m, big_m) = (lo.dim(), hi.dim());
            let shift = (big_m - m) / 2;
            let nodes = m / 4..(3 * m).div_ceil(4);
            let mut worst = (0.0_f64, 0.0);
            for (k, &r) in lo.grid().iter().enumerate() {
                for i in nodes.clone() {
                    let d = (lo.sigma()[k][i] - hi.sigma()[k][i + shift]).abs();
                    if d > worst.0 {
                        worst = (d, r);
                    }
                }
            }
            Some(Stabilization { sizes: (m, big_m), compared_nodes: nodes.len(), max_difference: worst.0, at_r: worst.1 })
        })
        .collect()
}

/// Subsystem description for the `lyapunov` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub models: Vec<SubsystemModel>,
    /// Decay rate of the composite function; defaults to the smallest node
    /// rate when all node rates are linear.
    #[serde(default)]
    pub alpha: Option<ScalarFn>,
    /// `γᵘ_max`; defaults to the largest external gain when all are linear.
    #[serde(default)]
    pub gamma_u: Option<ScalarFn>,
    #[serde(default)]
    pub batch: BatchConfig,
}

pub fn read_system(path: &Path) -> Result<SystemFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        Error::Parse(format!("system file field `{path}`: {}", e.into_inner()))
    })
}

fn linear_extreme<'a>(fs: impl Iterator<Item = &'a ScalarFn>, max: bool) -> Option<ScalarFn> {
    let mut out: Option<f64> = None;
    for f in fs {
        let a = f.linear_slope()?;
        out = Some(match out {
            None => a,
            Some(b) if max => a.max(b),
            Some(b) => a.min(b),
        });
    }
    match out {
        None => Some(ScalarFn::zero()),
        Some(0.0) => Some(ScalarFn::zero()),
        Some(a) => ScalarFn::linear(a).ok(),
    }
}

fn run_lyapunov(config: &RunConfig, spec: &NetworkSpec, system: &SystemFile) -> Result<Run> {
    validate_models(&system.models, Some(spec))?;
    let gamma_u = match &system.gamma_u {
        Some(g) => g.clone(),
        None => linear_extreme((0..spec.n()).filter_map(|i| spec.external_gain(i)), true)
            .ok_or_else(|| Error::Parse("nonlinear external gains: the system file needs `gamma_u`".into()))?,
    };
    let alpha = match &system.alpha {
        Some(a) => a.clone(),
        None => linear_extreme(system.models.iter().map(|m| &m.alpha), false)
            .ok_or_else(|| Error::Parse("nonlinear node decay rates: the system file needs `alpha`".into()))?,
    };
    let grid = config.grid_or(1e-3, 1e3, None);
    let table = match build_path_table(spec, &grid, None, &config.opts(), PathMode::SigmaStar) {
        Ok(t) => t,
        Err(e) if is_computation_failure(&e) => return Ok(Run::new(EXIT_FAILED, json!({ "error": e.to_string() }))),
        Err(e) => return Err(e),
    };
    let verify = verify_path(spec, &table, config.rho.as_ref(), &[], table.tol)?;
    let v = match assemble_v(table.clone(), system.models.clone(), gamma_u.clone()) {
        Ok(v) => v,
        Err(e) => return Ok(Run::new(EXIT_FAILED, json!({ "error": e.to_string(), "path": to_value(&verify) }))),
    };
    let batch = run_batch(&v, spec, &alpha, &system.batch, config.seed)?;
    let passed = verify.passed() && batch.passed();
    let report = json!({
        "alpha": to_value(&alpha),
        "gamma_u": to_value(&gamma_u),
        "path_passed": verify.passed(),
        "p1_worst": verify.p1_worst,
        "batch": to_value(&batch),
        "passed": passed,
    });
    let fit = to_json(&batch.fit)?;
    let mut run = Run::new(if passed { EXIT_OK } else { EXIT_FAILED }, report)
        .file("path.csv", path_csv(&table))
        .file("iss_fit.json", fit);
    run.table = Some(table);
    Ok(run)
}
