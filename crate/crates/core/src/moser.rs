//! Moser concentrating functions on `B_d(0)`:
//!
//! ```text
//! ω_j(x) = ω_{N-1}^{-1/N} · { (log j)^{(N-1)/N}            |x| ≤ d/j
//!                           { log(d/|x|) / (log j)^{1/N}    d/j < |x| < d
//!                           { 0                             |x| ≥ d
//! ```
//!
//! normalized so that `∫|∇ω_j|^N = 1`, with closed forms for `∫ω_j^m` and
//! `∫|∇ω_j|^m`, `m = 1..N`.

use std::sync::Arc;

use serde::Serialize;

use crate::constants::ProblemConfig;
use crate::error::{Error, Result};
use crate::radial::{RadialFunction, RadialGrid};
use crate::special::factorial;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoserFunction {
    cfg: ProblemConfig,
    j: f64,
}

impl MoserFunction {
    pub fn new(cfg: &ProblemConfig, j: f64) -> Result<Self> {
        if !(j >= 2.0 && j.is_finite()) {
            return Err(Error::domain(format!("Moser index j must be ≥ 2, got {j}")));
        }
        Ok(MoserFunction { cfg: *cfg, j })
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn config(&self) -> &ProblemConfig {
        &self.cfg
    }

    /// Radius `d/j` of the plateau.
    pub fn knee(&self) -> f64 {
        self.cfg.d / self.j
    }

    /// Value on the plateau `|x| ≤ d/j`.
    pub fn plateau(&self) -> f64 {
        let nf = self.cfg.nf();
        self.j.ln().powf((nf - 1.0) / nf) / self.cfg.omega.powf(1.0 / nf)
    }

    /// `ω_j` at `|x| = r`.
    pub fn value(&self, r: f64) -> f64 {
        let d = self.cfg.d;
        if r >= d {
            0.0
        } else if r <= self.knee() {
            self.plateau()
        } else {
            let nf = self.cfg.nf();
            (d / r).ln() / (self.j.ln().powf(1.0 / nf) * self.cfg.omega.powf(1.0 / nf))
        }
    }

    /// `|ω_j'(r)|`: zero on the plateau and outside, `1/(ω^{1/N} (log j)^{1/N} r)` on the annulus.
    pub fn gradient_magnitude(&self, r: f64) -> f64 {
        if r >= self.cfg.d || r <= self.knee() {
            0.0
        } else {
            let nf = self.cfg.nf();
            1.0 / ((self.cfg.omega * self.j.ln()).powf(1.0 / nf) * r)
        }
    }
}

fn check_order(n: u32, m: u32) -> Result<()> {
    if m < 1 || m > n {
        return Err(Error::domain(format!("moment order m = {m} must lie in 1..={n}")));
    }
    Ok(())
}

/// `∫ ω_j^m dx`, `1 ≤ m ≤ N`, in closed form.
pub fn moser_moment_closed(mf: &MoserFunction, m: u32) -> Result<f64> {
    let cfg = &mf.cfg;
    check_order(cfg.n, m)?;
    let nf = cfg.nf();
    let mf64 = m as f64;
    let log_j = mf.j.ln();
    let x = nf * log_j;
    let tail: f64 = (1..=m).map(|l| x.powi((m - l) as i32) / factorial(m - l)).sum();
    let bracket = 1.0 - tail / mf.j.powi(cfg.n as i32);
    Ok(factorial(m) * cfg.omega.powf(1.0 - mf64 / nf) * cfg.d.powi(cfg.n as i32)
        / (nf.powi(m as i32 + 1) * log_j.powf(mf64 / nf))
        * bracket)
}

/// The same moment assembled from `I_m`: `ω^{1-m/N} d^N (log j)^{-m/N} [I_m + (log j)^m/(N j^N)]`.
pub fn moser_moment_via_recurrence(mf: &MoserFunction, m: u32) -> Result<f64> {
    let cfg = &mf.cfg;
    check_order(cfg.n, m)?;
    let nf = cfg.nf();
    let log_j = mf.j.ln();
    let i_m = recurrence_i(mf.j, cfg.n, m)?.recurrence;
    Ok(cfg.omega.powf(1.0 - m as f64 / nf) * cfg.d.powi(cfg.n as i32) / log_j.powf(m as f64 / nf)
        * (i_m + log_j.powi(m as i32) / (nf * mf.j.powi(cfg.n as i32))))
}

/// `∫ |∇ω_j|^m dx`, `1 ≤ m ≤ N`; exactly 1 for `m = N`.
pub fn moser_gradient_moment_closed(mf: &MoserFunction, m: u32) -> Result<f64> {
    let cfg = &mf.cfg;
    check_order(cfg.n, m)?;
    if m == cfg.n {
        return Ok(1.0);
    }
    let nf = cfg.nf();
    let mf64 = m as f64;
    let k = cfg.n - m;
    Ok(cfg.omega.powf(1.0 - mf64 / nf) * cfg.d.powi(k as i32)
        / (k as f64 * mf.j.ln().powf(mf64 / nf))
        * (1.0 - mf.j.powi(-(k as i32))))
}

/// `I_m = ∫_{1/j}^1 (-log s)^m s^{N-1} ds` by the integration-by-parts recurrence
/// and by its closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecurrenceI {
    pub recurrence: f64,
    pub closed_form: f64,
}

pub fn recurrence_i(j: f64, n: u32, m: u32) -> Result<RecurrenceI> {
    if !(j >= 2.0 && j.is_finite()) {
        return Err(Error::domain(format!("j must be ≥ 2, got {j}")));
    }
    if m < 1 {
        return Err(Error::domain("m must be ≥ 1"));
    }
    if n < 1 {
        return Err(Error::domain("N must be ≥ 1"));
    }
    let nf = n as f64;
    let log_j = j.ln();
    let jn = j.powi(n as i32);
    let mut i = (1.0 - (nf * log_j + 1.0) / jn) / (nf * nf);
    for k in 2..=m {
        i = k as f64 / nf * i - log_j.powi(k as i32) / (nf * jn);
    }
    let x = nf * log_j;
    let sum: f64 = (0..=m).map(|l| x.powi((m - l) as i32) / factorial(m - l)).sum();
    let closed_form = factorial(m) / nf.powi(m as i32 + 1) * (1.0 - sum / jn);
    Ok(RecurrenceI {
        recurrence: i,
        closed_form,
    })
}

/// Nodal interpolant of `ω_j` on `grid`.
pub fn to_radial_function(mf: &MoserFunction, grid: &Arc<RadialGrid>) -> Result<RadialFunction> {
    let g = grid.config();
    if g.d != mf.cfg.d || g.n != mf.cfg.n {
        return Err(Error::config(
            "grid",
            format!(
                "grid is for (N = {}, d = {}) but the Moser function for (N = {}, d = {})",
                g.n, g.d, mf.cfg.n, mf.cfg.d
            ),
        ));
    }
    Ok(RadialFunction::from_fn(grid.clone(), |r| mf.value(r)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::grad_norm_n;
    use std::f64::consts::{E, PI};

    fn cfg(n: u32) -> ProblemConfig {
        ProblemConfig::new(n, 1.0, 1.0).unwrap()
    }

    #[test]
    fn branches_and_continuity() {
        for n in 2..=4 {
            let mf = MoserFunction::new(&cfg(n), 10.0).unwrap();
            assert_eq!(mf.value(1.0), 0.0);
            assert_eq!(mf.value(3.0), 0.0);
            let k = mf.knee();
            let inner = mf.value(k);
            let outer = mf.value(k * (1.0 + 1e-12));
            assert!((inner - mf.plateau()).abs() < 1e-15);
            assert!((inner - outer).abs() < 1e-10);
            assert!(mf.value(1.0 - 1e-12) < 1e-10);
        }
    }

    #[test]
    fn plateau_value_n2() {
        let mf = MoserFunction::new(&cfg(2), E * E).unwrap();
        assert!((mf.value(0.0) - (1.0 / PI).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_small_j() {
        assert!(MoserFunction::new(&cfg(2), 1.5).is_err());
        assert!(recurrence_i(1.0, 2, 1).is_err());
        assert!(recurrence_i(2.0, 2, 0).is_err());
    }

    #[test]
    fn moment_order_range() {
        let mf = MoserFunction::new(&cfg(3), 10.0).unwrap();
        assert!(moser_moment_closed(&mf, 0).is_err());
        assert!(moser_moment_closed(&mf, 4).is_err());
        assert!(moser_gradient_moment_closed(&mf, 4).is_err());
        assert_eq!(moser_gradient_moment_closed(&mf, 3).unwrap(), 1.0);
    }

    #[test]
    fn bracket_below_one() {
        for n in 2..=4 {
            for &j in &[2.0, 10.0, 100.0] {
                let mf = MoserFunction::new(&cfg(n), j).unwrap();
                for m in 1..=n {
                    let c = &mf.cfg;
                    let nf = n as f64;
                    let lead = factorial(m) * c.omega.powf(1.0 - m as f64 / nf)
                        / (nf.powi(m as i32 + 1) * j.ln().powf(m as f64 / nf));
                    assert!(moser_moment_closed(&mf, m).unwrap() < lead);
                }
            }
        }
    }

    #[test]
    fn recurrence_agrees_with_closed_form() {
        for n in 2..=5 {
            for &j in &[2.0, 10.0, 100.0] {
                for m in 1..=n {
                    let r = recurrence_i(j, n, m).unwrap();
                    assert!(
                        (r.recurrence - r.closed_form).abs() < 1e-12 * r.closed_form,
                        "N={n} j={j} m={m}"
                    );
                }
            }
        }
        let far = recurrence_i(1e12, 3, 2).unwrap();
        assert!((far.closed_form - 2.0 / 27.0).abs() < 1e-9);
    }

    #[test]
    fn moment_paths_agree() {
        for n in 2..=4 {
            let mf = MoserFunction::new(&cfg(n), 10.0).unwrap();
            for m in 1..=n {
                let a = moser_moment_closed(&mf, m).unwrap();
                let b = moser_moment_via_recurrence(&mf, m).unwrap();
                assert!((a - b).abs() < 1e-12 * a);
            }
        }
    }

    #[test]
    fn gradient_moments_vanish_with_j() {
        let c = cfg(3);
        let mut prev = f64::INFINITY;
        for &j in &[10.0, 1e3, 1e6, 1e12] {
            let v = moser_gradient_moment_closed(&MoserFunction::new(&c, j).unwrap(), 1).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn interpolant_properties() {
        let c = cfg(2);
        let mf = MoserFunction::new(&c, 10.0).unwrap();
        let grid = Arc::new(RadialGrid::graded_with_knots(&c, 512, 0.97, &[mf.knee()]).unwrap());
        let u = to_radial_function(&mf, &grid).unwrap();
        assert_eq!(*u.values().last().unwrap(), 0.0);
        assert_eq!(u.values()[0], mf.plateau());
        assert!((grad_norm_n(&u) - 1.0).abs() < 1e-3);
        let other = Arc::new(RadialGrid::graded(&ProblemConfig::new(2, 2.0, 1.0).unwrap(), 16, 1.0).unwrap());
        assert!(to_radial_function(&mf, &other).is_err());
    }
}
