//! Mountain-pass geometry along Moser rays and a path-deformation solver for
//! the critical point of `E` at the minimax level.
//!
//! The pipeline mirrors the existence argument: pick `j₀` with
//! `sup_t E(t ω_{j₀})` below the Palais–Smale bound, a ring radius `ρ` with
//! positive sampled energy, and `R > ρ` with `E(R ω_{j₀}) ≤ 0`; deform the ray
//! path `t ↦ t R ω_{j₀}` downhill around its maximum; then polish the path
//! maximizer to a critical point with damped Newton steps.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{ps_level_bound, ProblemConfig};
use crate::error::{Error, Result};
use crate::moser::{to_radial_function, MoserFunction};
use crate::nonlinearity::Primitive;
use crate::radial::{
    distance, energy, energy_gradient, energy_hessian, grad_norm_n, lp_norm, pairing, residual_norm,
    sobolev_gradient, RadialFunction, RadialGrid,
};

/// Sampled ray `t ↦ H_j(t) = E(t ω_j)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayScan {
    pub j: u64,
    pub t: Vec<f64>,
    pub h: Vec<f64>,
    /// Sample maximum refined by golden-section search around the best sample.
    pub sup: f64,
    pub argmax: f64,
    /// Final scan end after automatic doubling.
    pub t_max: f64,
    /// `H_j(t_max) < 0` was reached before the doubling cap.
    pub reaches_negative: bool,
}

const RAY_DOUBLINGS: usize = 40;
const GOLDEN: f64 = 0.618_033_988_749_894_8;

fn moser_on_grid(j: u64, grid: &Arc<RadialGrid>) -> Result<RadialFunction> {
    let mf = MoserFunction::new(grid.config(), j as f64)?;
    to_radial_function(&mf, grid)
}

/// Golden-section maximization of `f` on `[a, b]`.
fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Samples `H_j` at `t = 0` and on a log-spaced grid in `[t_max·10⁻⁴, t_max]`,
/// doubling `t_max` until `H_j(t_max) < 0` (at most 40 times).
pub fn scan_moser_ray(
    j: u64,
    prim: &Primitive,
    grid: &Arc<RadialGrid>,
    t_max: f64,
    samples: usize,
) -> Result<RayScan> {
    if samples < 100 {
        return Err(Error::domain(format!("need at least 100 ray samples, got {samples}")));
    }
    if !(t_max > 0.0) {
        return Err(Error::domain(format!("t_max must be positive, got {t_max}")));
    }
    let omega = moser_on_grid(j, grid)?;
    let ray = |t: f64| energy(&omega.scaled(t), prim);
    let mut t_max = t_max;
    let mut reaches_negative = false;
    for _ in 0..=RAY_DOUBLINGS {
        if ray(t_max) < 0.0 {
            reaches_negative = true;
            break;
        }
        t_max *= 2.0;
    }
    if !reaches_negative {
        t_max /= 2.0;
    }
    let lo = t_max * 1e-4;
    let ratio = (t_max / lo).powf(1.0 / (samples - 1) as f64);
    let mut t: Vec<f64> = vec![0.0];
    t.extend((0..samples).map(|i| if i + 1 == samples { t_max } else { lo * ratio.powi(i as i32) }));
    let h: Vec<f64> = t.par_iter().map(|&t| ray(t)).collect();

    let (k, &best) = h
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty scan");
    let (mut argmax, mut sup) = (t[k], best);
    if k > 0 && k + 1 < t.len() {
        let (ta, va) = golden_max(ray, t[k - 1], t[k + 1], 60);
        if va > sup {
            argmax = ta;
            sup = va;
        }
    }
    Ok(RayScan {
        j,
        t,
        h,
        sup,
        argmax,
        t_max,
        reaches_negative,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct J0Search {
    pub j0: Option<u64>,
    pub level_bound: f64,
    /// `(j, sup_t H_j(t))` for every scanned `j`.
    pub table: Vec<(u64, f64)>,
}

pub const RAY_SAMPLES: usize = 100;

/// Smallest `j` in `j_range` with `sup_t E(t ω_j) < (1/N)(α_N/α)^{N-1}`.
/// The ray scan starts at `t_max = 2 t₀`.
pub fn find_j0(prim: &Primitive, grid: &Arc<RadialGrid>, j_range: (u64, u64)) -> Result<J0Search> {
    let (lo, hi) = j_range;
    if lo < 2 || hi < lo {
        return Err(Error::domain(format!("invalid j range {lo}..={hi}")));
    }
    let cfg = grid.config();
    let bound = ps_level_bound(cfg);
    let t_start = 2.0 * cfg.t0;
    let mut table = Vec::new();
    let chunk = rayon::current_num_threads().max(1) as u64;
    let mut start = lo;
    while start <= hi {
        let end = (start + chunk - 1).min(hi);
        let rows: Vec<(u64, f64)> = (start..=end)
            .into_par_iter()
            .map(|j| scan_moser_ray(j, prim, grid, t_start, RAY_SAMPLES).map(|s| (j, s.sup)))
            .collect::<Result<_>>()?;
        for (j, sup) in rows {
            table.push((j, sup));
            if sup < bound {
                return Ok(J0Search {
                    j0: Some(j),
                    level_bound: bound,
                    table,
                });
            }
        }
        start = end + 1;
    }
    Ok(J0Search {
        j0: None,
        level_bound: bound,
        table,
    })
}

/// Random radial direction: three Gaussian bumps times `1 - (r/d)²`,
/// normalized to `‖v‖ = 1`.
pub fn random_direction(grid: &Arc<RadialGrid>, rng: &mut ChaCha8Rng) -> RadialFunction {
    let d = grid.d();
    let bumps: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| {
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let amp = sign * rng.gen_range(0.1..1.0);
            let centre = rng.gen_range(0.0..d);
            let width = rng.gen_range(0.05 * d..0.5 * d);
            (amp, centre, width)
        })
        .collect();
    let v = RadialFunction::from_fn(grid.clone(), |r| {
        let s: f64 = bumps
            .iter()
            .map(|(a, c, w)| a * (-(r - c).powi(2) / (2.0 * w * w)).exp())
            .sum();
        s * (1.0 - (r / d).powi(2))
    });
    let norm = grad_norm_n(&v);
    v.scaled(1.0 / norm)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RingCheck {
    pub rho: f64,
    /// Sampled estimate of `inf_{‖u‖=ρ} E(u)`; not a certificate.
    pub min_energy: f64,
    pub energies: Vec<f64>,
}

/// `min E(ρ v)` over `n_dirs` seeded random directions with `‖v‖ = 1`.
pub fn verify_ring(prim: &Primitive, grid: &Arc<RadialGrid>, rho: f64, n_dirs: usize, seed: u64) -> Result<RingCheck> {
    if !(rho > 0.0) {
        return Err(Error::domain(format!("ring radius must be positive, got {rho}")));
    }
    if n_dirs < 10 {
        return Err(Error::domain(format!("need at least 10 directions, got {n_dirs}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dirs: Vec<RadialFunction> = (0..n_dirs).map(|_| random_direction(grid, &mut rng)).collect();
    let energies: Vec<f64> = dirs.par_iter().map(|v| energy(&v.scaled(rho), prim)).collect();
    let min_energy = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(RingCheck {
        rho,
        min_energy,
        energies,
    })
}

/// Doubling search from `2ρ` for `E(R ω_{j₀}) ≤ 0`. If the accepted `R`
/// saturates the exponent guard it is bisected back to a finite nonpositive energy.
pub fn find_r(j0: u64, prim: &Primitive, grid: &Arc<RadialGrid>, rho: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::domain(format!("ρ must be positive, got {rho}")));
    }
    let omega = moser_on_grid(j0, grid)?;
    let e = |t: f64| energy(&omega.scaled(t), prim);
    let mut r = 2.0 * rho;
    let cap = 2f64.powi(60) * rho;
    while e(r) > 0.0 {
        r *= 2.0;
        if r > cap {
            return Err(Error::Convergence {
                what: format!("no R ≤ 2^60 ρ with E(R ω_{j0}) ≤ 0"),
                best: r,
                error: e(r / 2.0),
            });
        }
    }
    if !e(r).is_finite() {
        let (mut lo, mut hi) = (r / 2.0, r);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let v = e(mid);
            if v > 0.0 {
                lo = mid;
            } else if v.is_finite() {
                hi = mid;
                break;
            } else {
                hi = mid;
            }
        }
        r = hi;
        if !e(r).is_finite() {
            return Err(Error::Overflow { t: r });
        }
    }
    Ok(r)
}

pub fn check_ps_admissible(level_c: f64, cfg: &ProblemConfig) -> bool {
    level_c > 0.0 && level_c < ps_level_bound(cfg)
}

/// Discrete path from `0` to `R ω_{j₀}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathState {
    pub points: Vec<RadialFunction>,
    pub energies: Vec<f64>,
    pub max_index: usize,
}

impl PathState {
    fn new(points: Vec<RadialFunction>, prim: &Primitive) -> Self {
        let energies: Vec<f64> = points.par_iter().map(|p| energy(p, prim)).collect();
        let max_index = argmax(&energies);
        PathState {
            points,
            energies,
            max_index,
        }
    }

    pub fn max_energy(&self) -> f64 {
        self.energies[self.max_index]
    }

    /// Straight path `t R ω_{j₀}`, `t ∈ [0, 1]`.
    pub fn ray(endpoint: &RadialFunction, count: usize, prim: &Primitive) -> Self {
        let points = (0..count)
            .map(|k| {
                if k == 0 {
                    RadialFunction::zeros(endpoint.grid().clone())
                } else if k + 1 == count {
                    endpoint.clone()
                } else {
                    endpoint.scaled(k as f64 / (count - 1) as f64)
                }
            })
            .collect();
        PathState::new(points, prim)
    }

    /// Sum of `W^{1,N}_0` distances between consecutive points.
    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| distance(&w[0], &w[1])).sum()
    }

    /// Recomputes energies and compares them with the stored ones.
    pub fn energies_consistent(&self, prim: &Primitive) -> bool {
        self.points
            .iter()
            .zip(&self.energies)
            .all(|(p, &e)| energy(p, prim) == e)
    }

    /// Redistributes interior points at equal arclength, measured in the
    /// `W^{1,N}_0` norm of consecutive differences. Endpoints are untouched.
    fn equispaced(&self, prim: &Primitive) -> Self {
        let n = self.points.len();
        let seg: Vec<f64> = self.points.windows(2).map(|w| distance(&w[0], &w[1])).collect();
        let total: f64 = seg.iter().sum();
        if !(total > 0.0) {
            return self.clone();
        }
        let mut cum = vec![0.0; n];
        for i in 1..n {
            cum[i] = cum[i - 1] + seg[i - 1];
        }
        let mut points = Vec::with_capacity(n);
        points.push(self.points[0].clone());
        let mut s = 0;
        for k in 1..n - 1 {
            let target = total * k as f64 / (n - 1) as f64;
            while s + 1 < n - 1 && cum[s + 1] < target {
                s += 1;
            }
            let len = seg[s];
            let theta = if len > 0.0 { ((target - cum[s]) / len).clamp(0.0, 1.0) } else { 0.0 };
            points.push(self.points[s].lerp(&self.points[s + 1], theta));
        }
        points.push(self.points[n - 1].clone());
        PathState::new(points, prim)
    }
}

fn argmax(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("non-empty")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MountainPassParams {
    pub path_points: usize,
    pub max_iter: usize,
    pub step0: f64,
    pub tol_residual: f64,
    /// Points on each side of the maximum moved per iteration.
    pub window: usize,
    /// Iterations without relative path-max decrease above `1e-10` before stopping.
    pub stagnation_iters: usize,
    pub newton_max_iter: usize,
    pub j0: Option<u64>,
    pub j_max: u64,
    pub rho: Option<f64>,
    pub r: Option<f64>,
    pub ring_dirs: usize,
    /// Ring-direction seed; run configs carry it at top level.
    #[serde(skip)]
    pub seed: u64,
}

impl Default for MountainPassParams {
    fn default() -> Self {
        MountainPassParams {
            path_points: 41,
            max_iter: 2000,
            step0: 1e-2,
            tol_residual: 1e-6,
            window: 2,
            stagnation_iters: 30,
            newton_max_iter: 60,
            j0: None,
            j_max: 1000,
            rho: None,
            r: None,
            ring_dirs: 32,
            seed: 0,
        }
    }
}

impl MountainPassParams {
    pub fn validate(&self) -> Result<()> {
        if self.path_points < 5 {
            return Err(Error::config("solve.path_points", "need at least 5 path points"));
        }
        if !(self.step0 > 0.0) {
            return Err(Error::config("solve.step0", "must be positive"));
        }
        if !(self.tol_residual > 0.0) {
            return Err(Error::config("solve.tol_residual", "must be positive"));
        }
        if self.ring_dirs < 10 {
            return Err(Error::config("solve.ring_dirs", "need at least 10 directions"));
        }
        if self.j_max < 2 {
            return Err(Error::config("solve.j_max", "must be ≥ 2"));
        }
        Ok(())
    }
}

/// One row of the deformation trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub path_max: f64,
    pub max_index: usize,
    pub max_residual: f64,
    /// The respaced path did not raise the maximum and replaced the old one.
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    #[serde(skip)]
    pub u_star: RadialFunction,
    /// `E(u_star)` after polishing.
    pub level_c: f64,
    /// Path maximum at the end of the deformation, before polishing.
    pub pre_polish_level: f64,
    /// Maximum of `E` along the initial ray path.
    pub initial_path_max: f64,
    pub residual: f64,
    pub admissible: bool,
    pub level_bound: f64,
    pub j0: u64,
    #[serde(rename = "R")]
    pub r: f64,
    pub rho: f64,
    pub ring_min_energy: f64,
    pub iterations: usize,
    pub newton_iterations: usize,
    /// `|E'(u*) u*| / ‖u*‖^N`.
    pub nehari_defect: f64,
    pub lp_norm_n: f64,
    #[serde(skip)]
    pub trace: Vec<TraceRow>,
    #[serde(skip)]
    pub path: PathState,
    #[serde(skip)]
    pub initial_path: PathState,
}

impl SolveReport {
    /// Pipeline verdict: the located point is a critical point within tolerance
    /// at an admissible level.
    pub fn converged(&self, tol_residual: f64) -> bool {
        self.residual < tol_residual && self.admissible
    }
}

/// Descends one path point along the negative Sobolev gradient; the step is
/// halved until `E` decreases and the point moves at most `max_move`.
/// Returns the new point, its energy and the accepted step.
fn descend_point(
    p: &RadialFunction,
    e: f64,
    step: f64,
    max_move: f64,
    prim: &Primitive,
) -> Option<(RadialFunction, f64, f64)> {
    let g = energy_gradient(p, prim);
    let dir: Vec<f64> = sobolev_gradient(p, &g).into_iter().map(|x| -x).collect();
    let mut s = step;
    while s > 1e-14 {
        let q = p.axpy(s, &dir);
        let eq = energy(&q, prim);
        if eq.is_finite() && eq < e && distance(&q, p) <= max_move {
            return Some((q, eq, s));
        }
        s *= 0.5;
    }
    None
}

/// Damped Newton iteration on `E'(u) = 0` with the residual norm as merit.
/// Returns the best iterate, its residual and the iteration count.
fn newton_polish(u0: &RadialFunction, prim: &Primitive, tol: f64, max_iter: usize) -> (RadialFunction, f64, usize) {
    let mut u = u0.clone();
    let mut g = energy_gradient(&u, prim);
    let mut res = crate::radial::dual_norm(u.grid(), &g);
    let mut iters = 0;
    for _ in 0..max_iter {
        if res < 1e-3 * tol {
            break;
        }
        iters += 1;
        let hess = energy_hessian(&u, prim);
        let rhs: Vec<f64> = g.iter().map(|x| -x).collect();
        let step = match hess.solve(&rhs) {
            Some(s) if s.iter().all(|x| x.is_finite()) => s,
            _ => break,
        };
        let mut t = 1.0;
        let mut improved = false;
        while t > 1e-6 {
            let trial = u.axpy(t, &step);
            let gt = energy_gradient(&trial, prim);
            let rt = crate::radial::dual_norm(trial.grid(), &gt);
            if rt.is_finite() && rt < res {
                u = trial;
                g = gt;
                res = rt;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (u, res, iters)
}

/// Path-deformation mountain-pass solve. Missing `j₀`, `ρ` and `R` are
/// computed from the geometry first.
pub fn mountain_pass_solve(prim: &Primitive, grid: &Arc<RadialGrid>, params: &MountainPassParams) -> Result<SolveReport> {
    params.validate()?;
    let cfg = grid.config();
    let bound = ps_level_bound(cfg);

    let j0 = match params.j0 {
        Some(j) => j,
        None => find_j0(prim, grid, (2, params.j_max))?.j0.ok_or_else(|| Error::Convergence {
            what: format!("no j₀ ≤ {} with sup_t E(t ω_j) below the level bound", params.j_max),
            best: f64::NAN,
            error: f64::NAN,
        })?,
    };

    let rho = match params.rho {
        Some(r) => r,
        None => choose_rho(j0, prim, grid, params)?,
    };
    let ring = verify_ring(prim, grid, rho, params.ring_dirs, params.seed)?;
    let r = match params.r {
        Some(r) => r,
        None => find_r(j0, prim, grid, rho)?,
    };
    let endpoint = moser_on_grid(j0, grid)?.scaled(r);
    let initial = PathState::ray(&endpoint, params.path_points, prim);
    let initial_path_max = initial.max_energy();
    let mut path = initial.clone();
    let mut steps = vec![params.step0; params.path_points];
    let mut trace = Vec::new();
    let mut best_max = path.max_energy();
    let mut last_progress = 0;
    let mut iterations = 0;

    for it in 1..=params.max_iter {
        iterations = it;
        let k = path.max_index;
        let max_res = residual_norm(&path.points[k], prim);
        if max_res < params.tol_residual {
            break;
        }
        let lo = k.saturating_sub(params.window).max(1);
        let hi = (k + params.window).min(params.path_points - 2);
        let mut deformed = path.clone();
        let max_move = 0.5 * path.length() / (params.path_points - 1) as f64;
        for i in lo..=hi {
            if let Some((q, eq, s)) = descend_point(&deformed.points[i], deformed.energies[i], steps[i], max_move, prim) {
                steps[i] = if s == steps[i] { (2.0 * s).min(1.0) } else { s };
                deformed.points[i] = q;
                deformed.energies[i] = eq;
            } else {
                steps[i] = params.step0;
            }
        }
        deformed.max_index = argmax(&deformed.energies);
        let respaced = deformed.equispaced(prim);
        // A raised maximum after respacing means neighbours fell off opposite sides of the ridge.
        let accepted = respaced.max_energy() <= path.max_energy();
        if accepted {
            path = respaced;
        } else {
            for s in &mut steps[lo..=hi] {
                *s = (0.25 * *s).max(1e-12);
            }
        }
        trace.push(TraceRow {
            iteration: it,
            path_max: path.max_energy(),
            max_index: path.max_index,
            max_residual: max_res,
            accepted,
        });
        if path.max_energy() < best_max * (1.0 - 1e-10) - 1e-300 {
            best_max = path.max_energy();
            last_progress = it;
        } else if it - last_progress >= params.stagnation_iters {
            break;
        }
    }

    let pre_polish_level = path.max_energy();
    let start = refine_path_max(&path, prim);
    let (u_star, residual, newton_iterations) = newton_polish(&start, prim, params.tol_residual, params.newton_max_iter);
    let level_c = energy(&u_star, prim);
    let norm = grad_norm_n(&u_star);
    let nehari_defect = if norm > 0.0 {
        pairing(&energy_gradient(&u_star, prim), &u_star).abs() / norm.powi(cfg.n as i32)
    } else {
        f64::INFINITY
    };
    let report = SolveReport {
        lp_norm_n: lp_norm(&u_star, cfg.nf())?,
        u_star,
        level_c,
        pre_polish_level,
        initial_path_max,
        residual,
        admissible: check_ps_admissible(level_c, cfg),
        level_bound: bound,
        j0,
        r,
        rho,
        ring_min_energy: ring.min_energy,
        iterations,
        newton_iterations,
        nehari_defect,
        trace,
        path,
        initial_path: initial,
    };
    if !(report.residual < params.tol_residual) {
        return Err(Error::Stagnated(Box::new(report)));
    }
    Ok(report)
}

/// Golden-section refinement of the path maximum on the two segments adjacent to it.
fn refine_path_max(path: &PathState, prim: &Primitive) -> RadialFunction {
    let k = path.max_index;
    let mut best = (path.points[k].clone(), path.energies[k]);
    for (a, b) in [(k.wrapping_sub(1), k), (k, k + 1)] {
        if a >= path.points.len() || b >= path.points.len() {
            continue;
        }
        let (pa, pb) = (&path.points[a], &path.points[b]);
        let (theta, e) = golden_max(|th| energy(&pa.lerp(pb, th), prim), 0.0, 1.0, 50);
        if e > best.1 {
            best = (pa.lerp(pb, theta), e);
        }
    }
    best.0
}

/// Largest `ρ = 2^{-k} · argmax_t E(t ω_{j₀})/2` whose sampled ring energy is positive.
/// Uses `params.ring_dirs` directions and `params.seed`.
pub fn choose_rho(j0: u64, prim: &Primitive, grid: &Arc<RadialGrid>, params: &MountainPassParams) -> Result<f64> {
    let scan = scan_moser_ray(j0, prim, grid, 2.0 * grid.config().t0, RAY_SAMPLES)?;
    let mut rho = 0.5 * scan.argmax;
    for _ in 0..40 {
        if verify_ring(prim, grid, rho, params.ring_dirs, params.seed)?.min_energy > 0.0 {
            return Ok(rho);
        }
        rho *= 0.5;
    }
    Err(Error::Convergence {
        what: "no ring radius with positive sampled energy".into(),
        best: rho,
        error: f64::NAN,
    })
}
