//! First eigenvalue of `-Δ_N u = λ|u|^{N-2}u` on `B_d(0)` as the minimum of the
//! Rayleigh quotient `∫|∇u|^N / ∫|u|^N` over radial functions.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::radial::{
    dual_norm, gradient_power_sum, gradient_term_derivative, lp_power_sum, lp_term_derivative,
    sobolev_gradient, RadialFunction, RadialGrid,
};

const ARMIJO: f64 = 1e-4;
const BACKTRACK: f64 = 0.5;
const STALL_WINDOW: usize = 10;

pub fn rayleigh_quotient(u: &RadialFunction) -> Result<f64> {
    let denom = lp_power_sum(u, u.grid().config().nf());
    if !(denom > 0.0) {
        return Err(Error::domain("Rayleigh quotient of the zero function"));
    }
    Ok(gradient_power_sum(u) / denom)
}

/// Gradient of the Rayleigh quotient, `N (a' - Q b') / ∫|u|^N`, where `a'` and
/// `b'` differentiate `(1/N)∫|∇u|^N` and `(1/N)∫|u|^N`.
pub fn rayleigh_gradient(u: &RadialFunction) -> Result<(f64, Vec<f64>)> {
    let nf = u.grid().config().nf();
    let denom = lp_power_sum(u, nf);
    if !(denom > 0.0) {
        return Err(Error::domain("Rayleigh quotient of the zero function"));
    }
    let q = gradient_power_sum(u) / denom;
    let a = gradient_term_derivative(u);
    let b = lp_term_derivative(u, nf);
    let g = a.iter().zip(&b).map(|(a, b)| nf * (a - q * b) / denom).collect();
    Ok((q, g))
}

/// Dual norm of the Euler–Lagrange residual `a' - λ b'` at `u`.
pub fn eigen_residual(u: &RadialFunction, lambda: f64) -> f64 {
    let nf = u.grid().config().nf();
    let a = gradient_term_derivative(u);
    let b = lp_term_derivative(u, nf);
    let r: Vec<f64> = a.iter().zip(&b).map(|(a, b)| a - lambda * b).collect();
    dual_norm(u.grid(), &r)
}

fn normalized(u: &RadialFunction) -> RadialFunction {
    let nf = u.grid().config().nf();
    let norm = lp_power_sum(u, nf).powf(1.0 / nf);
    u.scaled(1.0 / norm)
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenResult {
    pub lambda1: f64,
    #[serde(skip)]
    pub eigenfunction: RadialFunction,
    pub iterations: usize,
    pub residual: f64,
    /// Quotient after every accepted step.
    pub history: Vec<f64>,
}

/// Minimizes the Rayleigh quotient by Sobolev-preconditioned projected
/// gradient descent: each step solves with the frozen `N`-Laplacian stiffness,
/// backtracks from `1/N` until the Armijo condition holds, and renormalizes
/// to `∫|u|^N = 1`. Stops once the quotient has dropped by less than `tol`
/// over the last 10 iterations.
pub fn first_eigenpair(grid: &Arc<RadialGrid>, tol: f64, max_iter: usize) -> Result<EigenResult> {
    if !(tol >= 1e-12) {
        return Err(Error::domain(format!("tolerance must be ≥ 1e-12, got {tol}")));
    }
    let d = grid.d();
    let nf = grid.config().nf();
    let mut u = normalized(&RadialFunction::from_fn(grid.clone(), |r| 1.0 - (r / d).powi(2)));
    let mut history = Vec::with_capacity(max_iter.min(10_000));
    let (mut q, mut g) = rayleigh_gradient(&u)?;
    history.push(q);

    for iter in 1..=max_iter {
        let dir: Vec<f64> = sobolev_gradient(&u, &g).into_iter().map(|x| -x).collect();
        let slope: f64 = g.iter().zip(&dir).map(|(a, b)| a * b).sum();
        let mut step = 1.0 / nf;
        let mut accepted = None;
        while step > 1e-20 {
            let trial = normalized(&u.axpy(step, &dir));
            if let Ok(qt) = rayleigh_quotient(&trial) {
                if qt <= q + ARMIJO * step * slope {
                    accepted = Some((trial, qt));
                    break;
                }
            }
            step *= BACKTRACK;
        }
        let Some((next, _)) = accepted else {
            // No descent left at working precision.
            return Ok(finish(u, q, iter, history));
        };
        u = next;
        (q, g) = rayleigh_gradient(&u)?;
        history.push(q);
        if history.len() > STALL_WINDOW {
            let back = history[history.len() - 1 - STALL_WINDOW];
            if back - q < tol {
                return Ok(finish(u, q, iter, history));
            }
        }
    }
    Err(Error::Convergence {
        what: format!("first eigenpair after {max_iter} iterations"),
        best: q,
        error: history
            .len()
            .checked_sub(STALL_WINDOW + 1)
            .map(|i| history[i] - q)
            .unwrap_or(f64::NAN),
    })
}

fn finish(u: RadialFunction, q: f64, iterations: usize, history: Vec<f64>) -> EigenResult {
    let u = if u.values().iter().sum::<f64>() < 0.0 { u.scaled(-1.0) } else { u };
    let residual = eigen_residual(&u, q);
    EigenResult {
        lambda1: q,
        eigenfunction: u,
        iterations,
        residual,
        history,
    }
}
