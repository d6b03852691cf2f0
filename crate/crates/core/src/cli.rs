//! Run configuration and the command implementations behind the `tmcrit` binary.
//!
//! Every command writes `config.json`, the fully resolved configuration, into
//! the output directory so the run can be replayed with `--config`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constants::{
    corollary12_threshold_with, moser_limit_constant, ps_level_bound, theorem11_threshold_with, theorem13_structure,
    MoserLimit, ProblemConfig, Theorem13Structure,
};
use crate::eigen::{first_eigenpair, EigenResult};
use crate::error::{Error, Result};
use crate::moser::{
    moser_gradient_moment_closed, moser_moment_closed, recurrence_i, MoserFunction,
};
use crate::mountain_pass::{
    choose_rho, find_j0, find_r, mountain_pass_solve, scan_moser_ray, verify_ring, J0Search, MountainPassParams,
    RayScan, RingCheck, SolveReport,
};
use crate::nonlinearity::{check_hypotheses_thm11_with, HypothesisReport, Nonlinearity, Primitive, SampleGrid};
use crate::quad::{integrate_with_breaks, QuadOptions};
use crate::radial::{GridSpec, RadialGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Constants,
    MoserCheck,
    Eigen,
    Scan,
    Solve,
    Thresholds,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::MoserCheck => "moser-check",
            Command::Eigen => "eigen",
            Command::Scan => "scan",
            Command::Solve => "solve",
            Command::Thresholds => "thresholds",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstantsParams {
    pub sigma0: f64,
    /// Acceptance tolerance for the extrapolated limit constant.
    pub moser_tol: f64,
}

impl Default for ConstantsParams {
    fn default() -> Self {
        ConstantsParams {
            sigma0: 0.0,
            moser_tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MoserCheckParams {
    pub dims: Vec<u32>,
    pub j: Vec<f64>,
    /// Rows above this relative error fail the command.
    pub max_rel_err: f64,
}

impl Default for MoserCheckParams {
    fn default() -> Self {
        MoserCheckParams {
            dims: vec![2, 3, 4],
            j: vec![2.0, 10.0, 100.0],
            max_rel_err: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EigenParams {
    pub tol: f64,
    pub max_iter: usize,
    /// Extra solves at `2M, 4M, …` for a convergence table.
    pub doublings: u32,
}

impl Default for EigenParams {
    fn default() -> Self {
        EigenParams {
            tol: 1e-10,
            max_iter: 20_000,
            doublings: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanParams {
    pub j_min: u64,
    pub j_max: u64,
    /// Additional `j` whose ray curves are written next to the `j₀` curve.
    pub rays: Vec<u64>,
    pub samples: usize,
    pub rho: Option<f64>,
    pub ring_dirs: usize,
}

impl Default for ScanParams {
    fn default() -> Self {
        ScanParams {
            j_min: 2,
            j_max: 1000,
            rays: Vec::new(),
            samples: 200,
            rho: None,
            ring_dirs: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdParams {
    pub sigma0: Vec<f64>,
}

impl Default for ThresholdParams {
    fn default() -> Self {
        ThresholdParams {
            sigma0: (0..10).map(|i| 0.25 * i as f64).collect(),
        }
    }
}

/// Complete description of a run. Missing sections take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    pub nonlinearity: Nonlinearity,
    pub grid: GridSpec,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub constants: ConstantsParams,
    pub moser_check: MoserCheckParams,
    pub eigen: EigenParams,
    pub hypotheses: SampleGrid,
    pub scan: ScanParams,
    pub solve: MountainPassParams,
    pub thresholds: ThresholdParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            problem: ProblemConfig::new(2, 1.0, 1.0).expect("valid default problem"),
            nonlinearity: Nonlinearity::Rational { beta0: 20.0, p: 2.0 },
            grid: GridSpec::default(),
            seed: 0,
            output_dir: PathBuf::from("out"),
            constants: ConstantsParams::default(),
            moser_check: MoserCheckParams::default(),
            eigen: EigenParams::default(),
            hypotheses: SampleGrid::default(),
            scan: ScanParams::default(),
            solve: MountainPassParams::default(),
            thresholds: ThresholdParams::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))?;
        cfg.prepared()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        RunConfig::from_json(&text)
    }

    /// Sets a dotted field such as `grid.M` or `solve.path_points` from a
    /// JSON literal; bare words are taken as strings.
    pub fn with_override(&self, key: &str, raw: &str) -> Result<Self> {
        let mut tree = serde_json::to_value(self)?;
        let value: serde_json::Value =
            serde_json::from_str(raw).unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
        let mut node = &mut tree;
        let parts: Vec<&str> = key.split('.').collect();
        for (i, part) in parts.iter().enumerate() {
            let obj = node
                .as_object_mut()
                .ok_or_else(|| Error::config(key, "path does not name an object field"))?;
            if i + 1 == parts.len() {
                if !obj.contains_key(*part) {
                    return Err(Error::config(key, "unknown field"));
                }
                obj.insert(part.to_string(), value);
                break;
            }
            node = obj
                .get_mut(*part)
                .ok_or_else(|| Error::config(key, format!("unknown section `{part}`")))?;
        }
        let cfg: RunConfig = serde_json::from_value(tree).map_err(|e| Error::config(key, e.to_string()))?;
        cfg.prepared()
    }

    fn prepared(mut self) -> Result<Self> {
        self.nonlinearity = self.nonlinearity.prepared()?;
        Ok(self)
    }

    /// Checks every field against the preconditions of the operations it feeds.
    pub fn validate(&self) -> Result<()> {
        self.nonlinearity
            .validate()
            .map_err(|e| Error::config("nonlinearity", e.to_string()))?;
        if self.grid.cells < 2 {
            return Err(Error::config("grid.M", "need at least 2 cells"));
        }
        if !(self.grid.grading > 0.0 && self.grid.grading <= 1.0) {
            return Err(Error::config("grid.grading", "must lie in (0, 1]"));
        }
        if !(self.constants.sigma0 >= 0.0) {
            return Err(Error::config("constants.sigma0", "must be ≥ 0"));
        }
        if !(self.constants.moser_tol >= 1e-8) {
            return Err(Error::config("constants.moser_tol", "must be ≥ 1e-8"));
        }
        if self.moser_check.dims.iter().any(|&n| n < 2) {
            return Err(Error::config("moser_check.dims", "dimensions must be ≥ 2"));
        }
        if self.moser_check.j.iter().any(|&j| !(j >= 2.0 && j.is_finite())) {
            return Err(Error::config("moser_check.j", "indices must be finite and ≥ 2"));
        }
        if !(self.eigen.tol >= 1e-12) {
            return Err(Error::config("eigen.tol", "must be ≥ 1e-12"));
        }
        if self.eigen.doublings > 6 {
            return Err(Error::config("eigen.doublings", "at most 6"));
        }
        self.hypotheses
            .validate()
            .map_err(|e| Error::config("hypotheses", e.to_string()))?;
        if self.scan.j_min < 2 || self.scan.j_max < self.scan.j_min {
            return Err(Error::config("scan.j_min", "need 2 ≤ j_min ≤ j_max"));
        }
        if self.scan.rays.iter().any(|&j| j < 2) {
            return Err(Error::config("scan.rays", "indices must be ≥ 2"));
        }
        if self.scan.samples < 100 {
            return Err(Error::config("scan.samples", "need at least 100"));
        }
        if self.scan.rho.is_some_and(|r| !(r > 0.0)) {
            return Err(Error::config("scan.rho", "must be positive"));
        }
        if self.scan.ring_dirs < 10 {
            return Err(Error::config("scan.ring_dirs", "need at least 10"));
        }
        self.solve.validate()?;
        if self.thresholds.sigma0.iter().any(|&s| !(s >= 0.0 && s.is_finite())) {
            return Err(Error::config("thresholds.sigma0", "values must be finite and ≥ 0"));
        }
        Ok(())
    }

    fn radial_grid(&self, cells: usize) -> Result<Arc<RadialGrid>> {
        Ok(Arc::new(RadialGrid::graded(&self.problem, cells, self.grid.grading)?))
    }

    fn solve_params(&self) -> MountainPassParams {
        MountainPassParams {
            seed: self.seed,
            ..self.solve
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Success,
    Validation,
    Convergence,
    HypothesisWarning,
    Io,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::Io => 1,
            Status::Validation => 2,
            Status::Convergence => 3,
            Status::HypothesisWarning => 4,
        }
    }

    pub fn of_error(err: &Error) -> Status {
        match err {
            Error::Domain(_) | Error::Config { .. } => Status::Validation,
            Error::Quadrature { .. } | Error::Convergence { .. } | Error::Overflow { .. } | Error::Stagnated(_) => {
                Status::Convergence
            }
            Error::Io(_) => Status::Io,
        }
    }
}

/// Result of a command that ran to completion (possibly with a warning).
#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: Status,
    pub summary: Vec<String>,
    pub files: Vec<PathBuf>,
}

/// A failed command, naming the pipeline stage that failed.
#[derive(Debug, Clone)]
pub struct StageError {
    pub stage: &'static str,
    pub error: Error,
    pub files: Vec<PathBuf>,
}

impl StageError {
    pub fn status(&self) -> Status {
        Status::of_error(&self.error)
    }
}

impl std::fmt::Display for StageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "stage `{}` failed: {}", self.stage, self.error)
    }
}

impl std::error::Error for StageError {}

trait Stage<T> {
    fn stage(self, name: &'static str) -> std::result::Result<T, StageError>;
}

impl<T> Stage<T> for Result<T> {
    fn stage(self, name: &'static str) -> std::result::Result<T, StageError> {
        self.map_err(|error| StageError {
            stage: name,
            error,
            files: Vec::new(),
        })
    }
}

struct Output {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Output {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        Ok(Output {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.files.push(p.clone());
        p
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let path = self.path(name);
        let mut f = fs::File::create(&path)?;
        serde_json::to_writer_pretty(&mut f, value)?;
        writeln!(f)?;
        Ok(())
    }

    fn csv<I, R>(&mut self, name: &str, header: &[&str], rows: I) -> Result<()>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = String>,
    {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    fn fail(&self, mut err: StageError) -> StageError {
        err.files = self.files.clone();
        err
    }
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

/// Runs `cmd`, writing all artifacts into `cfg.output_dir`.
pub fn run(cmd: Command, cfg: &RunConfig) -> std::result::Result<Outcome, StageError> {
    cfg.validate().stage("config")?;
    let mut out = Output::new(&cfg.output_dir).stage("output")?;
    out.json("config.json", cfg).stage("output")?;
    let result = match cmd {
        Command::Constants => cmd_constants(cfg, &mut out),
        Command::MoserCheck => cmd_moser_check(cfg, &mut out),
        Command::Eigen => cmd_eigen(cfg, &mut out),
        Command::Scan => cmd_scan(cfg, &mut out),
        Command::Solve => cmd_solve(cfg, &mut out),
        Command::Thresholds => cmd_thresholds(cfg, &mut out),
    };
    match result {
        Ok((status, summary)) => Ok(Outcome {
            status,
            summary,
            files: out.files,
        }),
        Err(e) => Err(out.fail(e)),
    }
}

type CmdResult = std::result::Result<(Status, Vec<String>), StageError>;

#[derive(Serialize)]
struct ConstantsReport {
    n: u32,
    d: f64,
    alpha: f64,
    sphere_area: f64,
    alpha_n: f64,
    n_prime: f64,
    kappa: f64,
    t0: f64,
    ps_level_bound: f64,
    moser_limit: MoserLimit,
    sigma0: f64,
    threshold: f64,
    corollary_threshold: f64,
}

fn cmd_constants(cfg: &RunConfig, out: &mut Output) -> CmdResult {
    let p = &cfg.problem;
    let limit = moser_limit_constant(p.n, cfg.constants.moser_tol).stage("moser_limit")?;
    let threshold = theorem11_threshold_with(p, cfg.constants.sigma0, limit.value).stage("threshold")?;
    let report = ConstantsReport {
        n: p.n,
        d: p.d,
        alpha: p.alpha,
        sphere_area: p.omega,
        alpha_n: p.alpha_n,
        n_prime: p.n_prime,
        kappa: p.kappa,
        t0: p.t0,
        ps_level_bound: ps_level_bound(p),
        sigma0: cfg.constants.sigma0,
        threshold,
        corollary_threshold: corollary12_threshold_with(p, limit.value),
        moser_limit: limit,
    };
    out.json("constants.json", &report).stage("output")?;
    Ok((
        Status::Success,
        vec![
            format!("sphere_area     {:.12}", report.sphere_area),
            format!("alpha_N         {:.12}", report.alpha_n),
            format!("kappa           {:.12}", report.kappa),
            format!("t0              {:.12}", report.t0),
            format!("ps_level_bound  {:.12}", report.ps_level_bound),
            format!(
                "moser_limit     {:.12} ± {:.1e}",
                report.moser_limit.value, report.moser_limit.error
            ),
            format!("threshold       {:.12} (sigma0 = {})", report.threshold, report.sigma0),
        ],
    ))
}

/// One row of the Moser-moment sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoserCheckRow {
    pub n: u32,
    pub j: f64,
    pub m: u32,
    pub kind: &'static str,
    pub closed: f64,
    pub quad: f64,
    pub rel_err: f64,
}

fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}

/// Closed forms against adaptive quadrature for `∫ω_j^m`, `∫|∇ω_j|^m` and `I_m`,
/// plus the `I_m` recurrence against its closed form.
pub fn moser_check_rows(dims: &[u32], js: &[f64], d: f64) -> Result<Vec<MoserCheckRow>> {
    let opts = QuadOptions {
        rel_tol: 1e-13,
        abs_tol: 0.0,
        max_intervals: 10_000,
    };
    let mut rows = Vec::new();
    for &n in dims {
        let cfg = ProblemConfig::new(n, d, 1.0)?;
        let nf = n as f64;
        for &j in js {
            let mf = MoserFunction::new(&cfg, j)?;
            let knee = mf.knee();
            let breaks = [0.0, knee, d];
            for m in 1..=n {
                let mi = m as i32;
                let closed = moser_moment_closed(&mf, m)?;
                let quad = cfg.omega
                    * integrate_with_breaks(|r| mf.value(r).powi(mi) * r.powi(n as i32 - 1), &breaks, opts)?.value;
                rows.push(MoserCheckRow {
                    n,
                    j,
                    m,
                    kind: "moment",
                    closed,
                    quad,
                    rel_err: rel_err(closed, quad),
                });

                let closed = moser_gradient_moment_closed(&mf, m)?;
                let quad = cfg.omega
                    * integrate_with_breaks(
                        |r| mf.gradient_magnitude(r).powi(mi) * r.powi(n as i32 - 1),
                        &breaks,
                        opts,
                    )?
                    .value;
                rows.push(MoserCheckRow {
                    n,
                    j,
                    m,
                    kind: "gradient_moment",
                    closed,
                    quad,
                    rel_err: rel_err(closed, quad),
                });

                let rec = recurrence_i(j, n, m)?;
                let direct = integrate_with_breaks(
                    |s| (-s.ln()).powi(mi) * s.powf(nf - 1.0),
                    &[1.0 / j, 1.0],
                    opts,
                )?
                .value;
                rows.push(MoserCheckRow {
                    n,
                    j,
                    m,
                    kind: "recurrence",
                    closed: rec.recurrence,
                    quad: direct,
                    rel_err: rel_err(rec.recurrence, direct),
                });
                rows.push(MoserCheckRow {
                    n,
                    j,
                    m,
                    kind: "recurrence_closed",
                    closed: rec.recurrence,
                    quad: rec.closed_form,
                    rel_err: rel_err(rec.recurrence, rec.closed_form),
                });
            }
        }
    }
    Ok(rows)
}

fn cmd_moser_check(cfg: &RunConfig, out: &mut Output) -> CmdResult {
    let p = &cfg.moser_check;
    let rows = moser_check_rows(&p.dims, &p.j, cfg.problem.d).stage("moser_check")?;
    out.csv(
        "moser_check.csv",
        &["N", "j", "m", "kind", "closed", "quad", "rel_err"],
        rows.iter().map(|r| {
            vec![
                r.n.to_string(),
                r.j.to_string(),
                r.m.to_string(),
                r.kind.to_string(),
                num(r.closed),
                num(r.quad),
                num(r.rel_err),
            ]
        }),
    )
    .stage("output")?;
    let worst = rows.iter().map(|r| r.rel_err).fold(0.0, f64::max);
    let failed = rows.iter().filter(|r| !(r.rel_err <= p.max_rel_err)).count();
    let summary = vec![format!(
        "{} rows, max rel_err {worst:.3e}, {failed} above {:.1e}",
        rows.len(),
        p.max_rel_err
    )];
    if failed > 0 {
        return Err(out.fail(StageError {
            stage: "moser_check",
            error: Error::Convergence {
                what: format!("{failed} moment rows above rel_err {:e}", p.max_rel_err),
                best: worst,
                error: worst,
            },
            files: Vec::new(),
        }));
    }
    Ok((Status::Success, summary))
}

#[derive(Serialize)]
struct EigenRow {
    cells: usize,
    lambda1: f64,
    iterations: usize,
    residual: f64,
}

fn cmd_eigen(cfg: &RunConfig, out: &mut Output) -> CmdResult {
    let mut table = Vec::new();
    let mut first: Option<EigenResult> = None;
    for k in 0..=cfg.eigen.doublings {
        let cells = cfg.grid.cells << k;
        let grid = cfg.radial_grid(cells).stage("grid")?;
        let res = first_eigenpair(&grid, cfg.eigen.tol, cfg.eigen.max_iter).stage("eigen")?;
        table.push(EigenRow {
            cells,
            lambda1: res.lambda1,
            iterations: res.iterations,
            residual: res.residual,
        });
        if first.is_none() {
            first = Some(res);
        }
    }
    let res = first.expect("at least one solve");
    out.json("eigen.json", &res).stage("output")?;
    res.eigenfunction
        .write_csv(&out.path("eigenfunction.csv"))
        .stage("output")?;
    if table.len() > 1 {
        out.csv(
            "eigen_convergence.csv",
            &["M", "lambda1", "iterations", "residual"],
            table
                .iter()
                .map(|r| vec![r.cells.to_string(), num(r.lambda1), r.iterations.to_string(), num(r.residual)]),
        )
        .stage("output")?;
    }
    Ok((
        Status::Success,
        table
            .iter()
            .map(|r| format!("M = {:6}  lambda1 = {:.10}  residual = {:.2e}", r.cells, r.lambda1, r.residual))
            .collect(),
    ))
}

#[derive(Serialize)]
struct ScanReport<'a> {
    lambda1: f64,
    hypotheses: &'a HypothesisReport,
    ps_level_bound: f64,
    j0: Option<u64>,
    sup_at_j0: Option<f64>,
    argmax_at_j0: Option<f64>,
    ring: Option<&'a RingCheck>,
}

fn hypotheses(cfg: &RunConfig, prim: &Primitive, grid: &Arc<RadialGrid>) -> std::result::Result<(f64, HypothesisReport), StageError> {
    let eig = first_eigenpair(grid, cfg.eigen.tol, cfg.eigen.max_iter).stage("eigen")?;
    let report = check_hypotheses_thm11_with(prim, eig.lambda1, &cfg.hypotheses).stage("hypotheses")?;
    Ok((eig.lambda1, report))
}

fn ray_rows(scans: &[RayScan]) -> Vec<Vec<String>> {
    scans
        .iter()
        .flat_map(|s| s.t.iter().zip(&s.h).map(move |(t, h)| vec![s.j.to_string(), num(*t), num(*h)]))
        .collect()
}

fn cmd_scan(cfg: &RunConfig, out: &mut Output) -> CmdResult {
    let p = &cfg.problem;
    let grid = cfg.radial_grid(cfg.grid.cells).stage("grid")?;
    let prim = Primitive::new(&cfg.nonlinearity, p).stage("primitive")?;
    let (lambda1, hyp) = hypotheses(cfg, &prim, &grid)?;
    out.json("hypotheses.json", &hyp).stage("output")?;

    let search: J0Search = find_j0(&prim, &grid, (cfg.scan.j_min, cfg.scan.j_max)).stage("find_j0")?;
    let bound = search.level_bound;
    out.csv(
        "scan_table.csv",
        &["j", "sup", "below_bound"],
        search
            .table
            .iter()
            .map(|(j, s)| vec![j.to_string(), num(*s), (*s < bound).to_string()]),
    )
    .stage("output")?;

    let mut rays: Vec<u64> = search.j0.into_iter().chain(cfg.scan.rays.iter().copied()).collect();
    rays.dedup();
    let scans: Vec<RayScan> = rays
        .iter()
        .map(|&j| scan_moser_ray(j, &prim, &grid, 2.0 * p.t0, cfg.scan.samples))
        .collect::<Result<_>>()
        .stage("scan_moser_ray")?;
    out.csv("rays.csv", &["j", "t", "H"], ray_rows(&scans)).stage("output")?;

    let mut ring = None;
    if let Some(j0) = search.j0 {
        let params = MountainPassParams {
            ring_dirs: cfg.scan.ring_dirs,
            ..cfg.solve_params()
        };
        let rho = match cfg.scan.rho {
            Some(r) => r,
            None => choose_rho(j0, &prim, &grid, &params).stage("verify_ring")?,
        };
        ring = Some(verify_ring(&prim, &grid, rho, cfg.scan.ring_dirs, cfg.seed).stage("verify_ring")?);
    }
    let j0_scan = scans.first().filter(|_| search.j0.is_some());
    let report = ScanReport {
        lambda1,
        hypotheses: &hyp,
        ps_level_bound: bound,
        j0: search.j0,
        sup_at_j0: j0_scan.map(|s| s.sup),
        argmax_at_j0: j0_scan.map(|s| s.argmax),
        ring: ring.as_ref(),
    };
    out.json("scan.json", &report).stage("output")?;

    let mut summary = vec![
        format!("lambda1 = {lambda1:.8}"),
        format!(
            "beta = {:.6}, threshold = {:.6}, satisfied = {}",
            hyp.beta_est,
            hyp.threshold.unwrap_or(f64::NAN),
            hyp.satisfied
        ),
    ];
    match (search.j0, j0_scan) {
        (Some(j0), Some(s)) => summary.push(format!("j0 = {j0}, sup H = {:.8} < bound {bound:.8}", s.sup)),
        _ => summary.push(format!(
            "no j0 in {}..={} with sup H below {bound:.8}",
            cfg.scan.j_min, cfg.scan.j_max
        )),
    }
    if let Some(r) = &ring {
        summary.push(format!("ring rho = {:.6}, min sampled E = {:.6e}", r.rho, r.min_energy));
    }
    let status = if hyp.satisfied && search.j0.is_some() {
        Status::Success
    } else {
        Status::HypothesisWarning
    };
    Ok((status, summary))
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    lambda1: f64,
    hypotheses: &'a HypothesisReport,
    scan_table: &'a [(u64, f64)],
    ring: &'a RingCheck,
    report: &'a SolveReport,
}

fn write_solve_artifacts(out: &mut Output, report: &SolveReport) -> Result<()> {
    report.u_star.write_csv(&out.path("u_star.csv"))?;
    out.csv(
        "trace.csv",
        &["iteration", "path_max", "max_index", "max_residual", "accepted"],
        report.trace.iter().map(|t| {
            vec![
                t.iteration.to_string(),
                num(t.path_max),
                t.max_index.to_string(),
                num(t.max_residual),
                t.accepted.to_string(),
            ]
        }),
    )?;
    out.csv(
        "path_energies.csv",
        &["index", "initial", "final"],
        report
            .initial_path
            .energies
            .iter()
            .zip(&report.path.energies)
            .enumerate()
            .map(|(i, (a, b))| vec![i.to_string(), num(*a), num(*b)]),
    )
}

fn cmd_solve(cfg: &RunConfig, out: &mut Output) -> CmdResult {
    let p = &cfg.problem;
    let grid = cfg.radial_grid(cfg.grid.cells).stage("grid")?;
    let prim = Primitive::new(&cfg.nonlinearity, p).stage("primitive")?;
    let (lambda1, hyp) = hypotheses(cfg, &prim, &grid)?;
    out.json("hypotheses.json", &hyp).stage("output")?;
    if !hyp.satisfied {
        return Ok((
            Status::HypothesisWarning,
            vec![format!(
                "hypotheses not satisfied (beta = {:.6}, threshold = {:.6}, sigma1 certificate: {}); solve skipped",
                hyp.beta_est,
                hyp.threshold.unwrap_or(f64::NAN),
                hyp.sigma1_delta.is_some()
            )],
        ));
    }

    let mut params = cfg.solve_params();
    let j0 = match params.j0 {
        Some(j) => j,
        None => {
            let search = find_j0(&prim, &grid, (2, params.j_max)).stage("find_j0")?;
            match search.j0 {
                Some(j) => j,
                None => {
                    out.csv(
                        "scan_table.csv",
                        &["j", "sup", "below_bound"],
                        search.table.iter().map(|(j, s)| vec![j.to_string(), num(*s), "false".into()]),
                    )
                    .stage("output")?;
                    return Ok((
                        Status::HypothesisWarning,
                        vec![format!("no j0 ≤ {} with sup H below the level bound", params.j_max)],
                    ));
                }
            }
        }
    };
    params.j0 = Some(j0);
    let scan_table = vec![(j0, scan_moser_ray(j0, &prim, &grid, 2.0 * p.t0, 100).stage("scan_moser_ray")?.sup)];
    let rho = match params.rho {
        Some(r) => r,
        None => choose_rho(j0, &prim, &grid, &params).stage("verify_ring")?,
    };
    params.rho = Some(rho);
    let ring = verify_ring(&prim, &grid, rho, params.ring_dirs, params.seed).stage("verify_ring")?;
    let r = match params.r {
        Some(r) => r,
        None => find_r(j0, &prim, &grid, rho).stage("find_R")?,
    };
    params.r = Some(r);

    let report = match mountain_pass_solve(&prim, &grid, &params) {
        Ok(rep) => rep,
        Err(Error::Stagnated(rep)) => {
            let failed = SolveOutput {
                lambda1,
                hypotheses: &hyp,
                scan_table: &scan_table,
                ring: &ring,
                report: &rep,
            };
            out.json("solve_failed.json", &failed).stage("output")?;
            write_solve_artifacts(out, &rep).stage("output")?;
            return Err(out.fail(StageError {
                stage: "mountain_pass",
                error: Error::Stagnated(rep),
                files: Vec::new(),
            }));
        }
        Err(e) => return Err(out.fail(StageError {
            stage: "mountain_pass",
            error: e,
            files: Vec::new(),
        })),
    };
    let output = SolveOutput {
        lambda1,
        hypotheses: &hyp,
        scan_table: &scan_table,
        ring: &ring,
        report: &report,
    };
    out.json("solve.json", &output).stage("output")?;
    write_solve_artifacts(out, &report).stage("output")?;

    let summary = vec![
        format!("j0 = {j0}, rho = {rho:.6}, R = {r:.6}"),
        format!(
            "c = {:.10} (path max before polish {:.10}), bound {:.6}",
            report.level_c, report.pre_polish_level, report.level_bound
        ),
        format!(
            "residual = {:.3e}, iterations = {} + {} Newton, admissible = {}",
            report.residual, report.iterations, report.newton_iterations, report.admissible
        ),
    ];
    let status = if report.admissible {
        Status::Success
    } else {
        Status::HypothesisWarning
    };
    Ok((status, summary))
}

#[derive(Serialize)]
struct ThresholdReport {
    moser_limit: MoserLimit,
    corollary_threshold: f64,
    sigma0: Vec<f64>,
    threshold: Vec<f64>,
    strictly_increasing: bool,
    theorem13: Theorem13Structure,
}

fn cmd_thresholds(cfg: &RunConfig, out: &mut Output) -> CmdResult {
    let p = &cfg.problem;
    let limit = moser_limit_constant(p.n, cfg.constants.moser_tol).stage("moser_limit")?;
    let mut sigma0 = cfg.thresholds.sigma0.clone();
    sigma0.sort_by(f64::total_cmp);
    let threshold: Vec<f64> = sigma0
        .iter()
        .map(|&s| theorem11_threshold_with(p, s, limit.value))
        .collect::<Result<_>>()
        .stage("threshold")?;
    out.csv(
        "thresholds.csv",
        &["sigma0", "threshold"],
        sigma0.iter().zip(&threshold).map(|(s, t)| vec![num(*s), num(*t)]),
    )
    .stage("output")?;
    let report = ThresholdReport {
        corollary_threshold: corollary12_threshold_with(p, limit.value),
        moser_limit: limit,
        strictly_increasing: threshold.windows(2).all(|w| w[1] > w[0]),
        sigma0,
        threshold,
        theorem13: theorem13_structure(p),
    };
    out.json("thresholds.json", &report).stage("output")?;
    Ok((
        Status::Success,
        vec![
            format!("corollary threshold (sigma0 = 0): {:.12}", report.corollary_threshold),
            format!(
                "{} sigma0 values, strictly increasing: {}",
                report.sigma0.len(),
                report.strictly_increasing
            ),
        ],
    ))
}
