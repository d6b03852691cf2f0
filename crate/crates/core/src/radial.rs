//! Radial discretization of `W^{1,N}_0(B_d(0))`.
//!
//! Functions are continuous piecewise-linear in `r` with nodal values
//! `u_0, …, u_M` and `u_M = 0`. The gradient term uses the midpoint radius of
//! each cell, `ω_{N-1} Σ |Δu/Δr|^N r̄^{N-1} Δr`; zeroth-order terms use the nodal
//! rule `Σ V_i F(u_i)` with `V_i = ω_{N-1} ∫ φ_i r^{N-1} dr` the exact hat-function
//! volumes. Gradients are exact derivatives of these discrete formulas.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constants::ProblemConfig;
use crate::error::{Error, Result};
use crate::nonlinearity::Primitive;

/// Cell count of the reference mesh on which `grading` is the ratio of consecutive cell widths.
pub const GRADING_REFERENCE_CELLS: usize = 256;

/// Mesh parameters as stored in run configs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    /// Number of cells.
    #[serde(rename = "M")]
    pub cells: usize,
    /// Consecutive width ratio (inner/outer) of the 256-cell reference mesh; 1 is uniform.
    pub grading: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            cells: 512,
            grading: 0.97,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    cfg: ProblemConfig,
    nodes: Vec<f64>,
    widths: Vec<f64>,
    /// `ω r̄_i^{N-1} h_i` per cell.
    cell_weights: Vec<f64>,
    /// `V_i` per node.
    volumes: Vec<f64>,
}

impl RadialGrid {
    /// Graded mesh `r_i = d (e^{a i/M} - 1)/(e^a - 1)` with
    /// `a = -(256 - 1) ln(grading)`, so the inner/outer width ratio does not
    /// depend on `M`.
    pub fn graded(cfg: &ProblemConfig, cells: usize, grading: f64) -> Result<Self> {
        if cells < 2 {
            return Err(Error::config("grid.M", format!("need at least 2 cells, got {cells}")));
        }
        if !(grading > 0.0 && grading <= 1.0) {
            return Err(Error::config("grid.grading", format!("must lie in (0, 1], got {grading}")));
        }
        let a = -((GRADING_REFERENCE_CELLS - 1) as f64) * grading.ln();
        let nodes: Vec<f64> = (0..=cells)
            .map(|i| {
                let x = i as f64 / cells as f64;
                if a < 1e-12 {
                    cfg.d * x
                } else {
                    cfg.d * (a * x).exp_m1() / a.exp_m1()
                }
            })
            .collect();
        let mut nodes = nodes;
        nodes[cells] = cfg.d;
        RadialGrid::from_nodes(cfg, nodes)
    }

    pub fn from_spec(cfg: &ProblemConfig, spec: &GridSpec) -> Result<Self> {
        RadialGrid::graded(cfg, spec.cells, spec.grading)
    }

    /// Graded mesh whose nearest interior nodes are moved onto each knot in `knots`.
    pub fn graded_with_knots(cfg: &ProblemConfig, cells: usize, grading: f64, knots: &[f64]) -> Result<Self> {
        let base = RadialGrid::graded(cfg, cells, grading)?;
        let mut nodes = base.nodes;
        for &k in knots {
            if !(k > 0.0 && k < cfg.d) {
                continue;
            }
            let i = match nodes.binary_search_by(|v| v.total_cmp(&k)) {
                Ok(_) => continue,
                Err(i) => i,
            };
            let j = if k - nodes[i - 1] < nodes[i] - k { i - 1 } else { i };
            if j == 0 || j == cells {
                continue;
            }
            if nodes[j - 1] < k && k < nodes[j + 1] {
                nodes[j] = k;
            }
        }
        RadialGrid::from_nodes(cfg, nodes)
    }

    pub fn from_nodes(cfg: &ProblemConfig, nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::config("grid.nodes", "need at least 3 nodes"));
        }
        if nodes[0] != 0.0 || *nodes.last().expect("non-empty") != cfg.d {
            return Err(Error::config("grid.nodes", "nodes must start at 0 and end at d"));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::config("grid.nodes", "nodes must be strictly increasing"));
        }
        let n = cfg.n as i32;
        let omega = cfg.omega;
        let widths: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        let cell_weights = nodes
            .windows(2)
            .zip(&widths)
            .map(|(w, h)| omega * (0.5 * (w[0] + w[1])).powi(n - 1) * h)
            .collect();
        let mut volumes = vec![0.0; nodes.len()];
        for (i, (w, &h)) in nodes.windows(2).zip(&widths).enumerate() {
            let (left, right) = hat_moments(w[0], h, cfg.n);
            volumes[i] += omega * left;
            volumes[i + 1] += omega * right;
        }
        Ok(RadialGrid {
            cfg: *cfg,
            nodes,
            widths,
            cell_weights,
            volumes,
        })
    }

    pub fn config(&self) -> &ProblemConfig {
        &self.cfg
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    pub fn cells(&self) -> usize {
        self.widths.len()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn d(&self) -> f64 {
        self.cfg.d
    }

    /// `Σ V_i`, equal to the ball volume.
    pub fn total_volume(&self) -> f64 {
        self.volumes.iter().sum()
    }
}

/// `(∫_a^{a+h} (b-r)/h r^{N-1} dr, ∫_a^{a+h} (r-a)/h r^{N-1} dr)` by binomial
/// expansion in `r = a + h s`; all terms are non-negative.
fn hat_moments(a: f64, h: f64, n: u32) -> (f64, f64) {
    let p = n - 1;
    let mut left = 0.0;
    let mut right = 0.0;
    let mut binom = 1.0;
    for k in 0..=p {
        let term = binom * a.powi((p - k) as i32) * h.powi(k as i32 + 1);
        let kf = k as f64;
        left += term / ((kf + 1.0) * (kf + 2.0));
        right += term / (kf + 2.0);
        binom = binom * (p - k) as f64 / (kf + 1.0);
    }
    (left, right)
}

/// Nodal values of a radial function on a shared grid; `u_M = 0` always.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialFunction {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl RadialFunction {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::domain(format!(
                "expected {} nodal values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("nodal values must be finite"));
        }
        if *values.last().expect("non-empty") != 0.0 {
            return Err(Error::domain("boundary value u_M must be 0"));
        }
        Ok(RadialFunction { grid, values })
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let values = vec![0.0; grid.len()];
        RadialFunction { grid, values }
    }

    /// Samples `f` at the nodes; the boundary node is set to 0.
    pub fn from_fn<F: Fn(f64) -> f64>(grid: Arc<RadialGrid>, f: F) -> Self {
        let mut values: Vec<f64> = grid.nodes().iter().map(|&r| f(r)).collect();
        *values.last_mut().expect("non-empty") = 0.0;
        RadialFunction { grid, values }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scaled(&self, s: f64) -> Self {
        RadialFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| s * v).collect(),
        }
    }

    /// `self + s·dir`, with the boundary entry kept at 0.
    pub fn axpy(&self, s: f64, dir: &[f64]) -> Self {
        let mut values: Vec<f64> = self.values.iter().zip(dir).map(|(u, d)| u + s * d).collect();
        *values.last_mut().expect("non-empty") = 0.0;
        RadialFunction {
            grid: self.grid.clone(),
            values,
        }
    }

    /// `(1-θ) self + θ other`.
    pub fn lerp(&self, other: &RadialFunction, theta: f64) -> Self {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + theta * (b - a))
            .collect();
        RadialFunction {
            grid: self.grid.clone(),
            values,
        }
    }

    pub fn difference(&self, other: &RadialFunction) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        RadialFunction {
            grid: self.grid.clone(),
            values,
        }
    }

    fn slopes(&self) -> impl Iterator<Item = f64> + '_ {
        self.values
            .windows(2)
            .zip(self.grid.widths())
            .map(|(w, h)| (w[1] - w[0]) / h)
    }

    /// Writes a two-column `(r, u)` CSV with header.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["r", "u"])?;
        for (r, u) in self.grid.nodes().iter().zip(&self.values) {
            w.write_record([format!("{r:e}"), format!("{u:e}")])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a CSV written by [`RadialFunction::write_csv`]; the `r` column must match the grid.
    pub fn read_csv(grid: Arc<RadialGrid>, path: &Path) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path)?;
        let mut values = Vec::with_capacity(grid.len());
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Io(format!("row {i}: not a number: {s}")))
            };
            let r = parse(&rec[0])?;
            let expected = grid.nodes().get(i).copied().unwrap_or(f64::NAN);
            if (r - expected).abs() > 1e-12 * grid.d() {
                return Err(Error::domain(format!("row {i}: radius {r} does not match grid node {expected}")));
            }
            values.push(parse(&rec[1])?);
        }
        RadialFunction::new(grid, values)
    }
}

/// `(∫|∇u|^N dx)^{1/N}`.
pub fn grad_norm_n(u: &RadialFunction) -> f64 {
    let n = u.grid.cfg.n as i32;
    gradient_power_sum(u).powf(1.0 / n as f64)
}

/// `∫|∇u|^N dx`.
pub fn gradient_power_sum(u: &RadialFunction) -> f64 {
    let n = u.grid.cfg.n as i32;
    u.slopes()
        .zip(&u.grid.cell_weights)
        .map(|(s, c)| c * s.abs().powi(n))
        .sum()
}

/// `(∫|u|^p dx)^{1/p}` by the nodal rule.
pub fn lp_norm(u: &RadialFunction, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::domain(format!("p must be ≥ 1, got {p}")));
    }
    Ok(lp_power_sum(u, p).powf(1.0 / p))
}

pub fn lp_power_sum(u: &RadialFunction, p: f64) -> f64 {
    u.values
        .iter()
        .zip(&u.grid.volumes)
        .map(|(v, w)| w * v.abs().powf(p))
        .sum()
}

/// Gradient of `(1/N)∫|∇u|^N` with respect to the nodal values.
pub fn gradient_term_derivative(u: &RadialFunction) -> Vec<f64> {
    let n = u.grid.cfg.n as i32;
    let mut g = vec![0.0; u.values.len()];
    for (i, (s, (c, h))) in u
        .slopes()
        .zip(u.grid.cell_weights.iter().zip(u.grid.widths()))
        .enumerate()
    {
        let flux = c * s.abs().powi(n - 2) * s / h;
        g[i] -= flux;
        g[i + 1] += flux;
    }
    *g.last_mut().expect("non-empty") = 0.0;
    g
}

/// Gradient of `(1/p)∫|u|^p` with respect to the nodal values.
pub fn lp_term_derivative(u: &RadialFunction, p: f64) -> Vec<f64> {
    let mut g: Vec<f64> = u
        .values
        .iter()
        .zip(&u.grid.volumes)
        .map(|(v, w)| w * v.abs().powf(p - 2.0) * v)
        .map(|x| if x.is_nan() { 0.0 } else { x })
        .collect();
    *g.last_mut().expect("non-empty") = 0.0;
    g
}

/// `E(u) = (1/N)∫|∇u|^N - ∫G(u)`. Saturates to `-∞` once any node trips the
/// exponent guard.
pub fn energy(u: &RadialFunction, prim: &Primitive) -> f64 {
    let nf = u.grid.cfg.nf();
    let potential: f64 = u
        .values
        .iter()
        .zip(&u.grid.volumes)
        .map(|(&v, w)| if v == 0.0 { 0.0 } else { w * prim.g(v) })
        .sum();
    gradient_power_sum(u) / nf - potential
}

/// `∂E/∂u_i` of the discrete energy; the boundary entry is 0.
pub fn energy_gradient(u: &RadialFunction, prim: &Primitive) -> Vec<f64> {
    let mut g = gradient_term_derivative(u);
    let last = g.len() - 1;
    for (i, (gi, (&v, w))) in g.iter_mut().zip(u.values.iter().zip(&u.grid.volumes)).enumerate() {
        if i < last && v != 0.0 {
            *gi -= w * prim.f(v);
        }
    }
    g
}

/// Symmetric tridiagonal matrix stored by diagonals; `upper[i]` couples `i` and `i+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    /// Solves `A x = b` by the Thomas algorithm. Returns `None` on a zero pivot.
    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        let n = self.diag.len();
        let mut c = vec![0.0; n];
        let mut x = vec![0.0; n];
        let mut piv = self.diag[0];
        if piv == 0.0 || !piv.is_finite() {
            return None;
        }
        x[0] = b[0] / piv;
        for i in 1..n {
            c[i - 1] = self.upper[i - 1] / piv;
            piv = self.diag[i] - self.upper[i - 1] * c[i - 1];
            if piv == 0.0 || !piv.is_finite() {
                return None;
            }
            x[i] = (b[i] - self.upper[i - 1] * x[i - 1]) / piv;
        }
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        Some(x)
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.upper[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.upper[i] * x[i + 1];
                }
                y
            })
            .collect()
    }
}

/// Stiffness matrix `Σ_i k_i (e_{i+1} - e_i)(e_{i+1} - e_i)^T` with
/// `k_i = weight_i c_i / h_i²`, and the Dirichlet row at `r = d` replaced by identity.
fn weighted_stiffness(grid: &RadialGrid, weights: impl Iterator<Item = f64>) -> Tridiagonal {
    let m = grid.len();
    let mut diag = vec![0.0; m];
    let mut upper = vec![0.0; m - 1];
    for (i, (w, (c, h))) in weights.zip(grid.cell_weights.iter().zip(grid.widths())).enumerate() {
        let k = w * c / (h * h);
        diag[i] += k;
        diag[i + 1] += k;
        upper[i] -= k;
    }
    diag[m - 1] = 1.0;
    upper[m - 2] = 0.0;
    Tridiagonal { diag, upper }
}

/// Second derivative of the discrete `E` (tridiagonal), boundary row identity.
pub fn energy_hessian(u: &RadialFunction, prim: &Primitive) -> Tridiagonal {
    let nf = u.grid.cfg.nf();
    let n = u.grid.cfg.n as i32;
    let mut hess = weighted_stiffness(&u.grid, u.slopes().map(|s| (nf - 1.0) * s.abs().powi(n - 2)));
    let last = u.values.len() - 1;
    for i in 0..last {
        hess.diag[i] -= u.grid.volumes[i] * prim.df(u.values[i]);
    }
    hess
}

/// Solves `K z = g` with the frozen-coefficient `N`-Laplacian stiffness at `u`
/// (the plain weighted Laplacian for `N = 2`). This is the Sobolev gradient
/// used by the descent methods; cell weights are floored at `1e-3` of their
/// maximum for `N > 2` and replaced by 1 when `u` is flat.
pub fn sobolev_gradient(u: &RadialFunction, g: &[f64]) -> Vec<f64> {
    let n = u.grid.cfg.n as i32;
    let weights: Vec<f64> = if n == 2 {
        vec![1.0; u.grid.cells()]
    } else {
        let raw: Vec<f64> = u.slopes().map(|s| s.abs().max(1e-300).powi(n - 2)).collect();
        let max = raw.iter().cloned().fold(0.0, f64::max);
        if max > 1e-200 {
            raw.iter().map(|w| w.max(1e-3 * max)).collect()
        } else {
            vec![1.0; raw.len()]
        }
    };
    let k = weighted_stiffness(&u.grid, weights.into_iter());
    let mut rhs = g.to_vec();
    *rhs.last_mut().expect("non-empty") = 0.0;
    k.solve(&rhs).expect("stiffness matrix is positive definite")
}

/// `∫ e^{α|u|^{N'}} dx` by the nodal rule; `+∞` on overflow.
pub fn tm_functional(u: &RadialFunction, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::domain(format!("α must be positive, got {alpha}")));
    }
    let np = u.grid.cfg.n_prime;
    Ok(u.values
        .iter()
        .zip(&u.grid.volumes)
        .map(|(v, w)| {
            let x = alpha * v.abs().powf(np);
            if x > crate::nonlinearity::EXP_GUARD {
                f64::INFINITY
            } else {
                w * x.exp()
            }
        })
        .sum())
}

/// `(Σ_{i<M} g_i² / V_i)^{1/2}` for a nodal gradient `g`: the discrete `L²`
/// norm of the strong residual `g_i / V_i`.
pub fn dual_norm(grid: &RadialGrid, g: &[f64]) -> f64 {
    let last = g.len() - 1;
    g.iter()
        .zip(grid.volumes())
        .take(last)
        .map(|(gi, v)| gi * gi / v)
        .sum::<f64>()
        .sqrt()
}

/// Solver convergence measure: [`dual_norm`] of [`energy_gradient`].
pub fn residual_norm(u: &RadialFunction, prim: &Primitive) -> f64 {
    dual_norm(&u.grid, &energy_gradient(u, prim))
}

/// `Σ_i g_i v_i`, the discrete pairing `E'(u) v`.
pub fn pairing(g: &[f64], v: &RadialFunction) -> f64 {
    g.iter().zip(v.values()).map(|(a, b)| a * b).sum()
}

/// Squared distance in the `(∫|∇·|^N)^{1/N}` norm.
pub fn distance(a: &RadialFunction, b: &RadialFunction) -> f64 {
    grad_norm_n(&a.difference(b))
}
