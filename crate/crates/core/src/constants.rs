//! Named constants of the critical problem: sphere area, the sharp
//! Trudinger–Moser exponent, the Palais–Smale level bound, the limit constant
//! `𝓜 = lim ∫_0^1 n e^{-n(t - t^{N'})} dt` and the solvability thresholds on β.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate_with_breaks, QuadOptions};
use crate::special::{factorial, gamma_half};

/// Area of the unit sphere `S^{N-1} ⊂ R^N`, `2π^{N/2} / Γ(N/2)`.
pub fn sphere_area(n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain(format!("dimension N = {n} must be at least 2")));
    }
    Ok(2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n)?)
}

/// `α_N = N ω_{N-1}^{1/(N-1)}`.
pub fn trudinger_moser_constant(n: u32) -> Result<f64> {
    let omega = sphere_area(n)?;
    Ok(n as f64 * omega.powf(1.0 / (n as f64 - 1.0)))
}

/// Problem data `(N, d, α)` together with the constants derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProblem", into = "RawProblem")]
pub struct ProblemConfig {
    pub n: u32,
    pub d: f64,
    pub alpha: f64,
    /// Hölder conjugate `N' = N/(N-1)`.
    pub n_prime: f64,
    /// `ω_{N-1}`.
    pub omega: f64,
    /// `α_N`.
    pub alpha_n: f64,
    /// `κ = (1/N!) (N/d)^N`.
    pub kappa: f64,
    /// `t₀ = (α_N/α)^{(N-1)/N}`.
    pub t0: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RawProblem {
    n: u32,
    d: f64,
    alpha: f64,
}

impl TryFrom<RawProblem> for ProblemConfig {
    type Error = Error;
    fn try_from(r: RawProblem) -> Result<Self> {
        ProblemConfig::new(r.n, r.d, r.alpha)
    }
}

impl From<ProblemConfig> for RawProblem {
    fn from(c: ProblemConfig) -> Self {
        RawProblem {
            n: c.n,
            d: c.d,
            alpha: c.alpha,
        }
    }
}

impl ProblemConfig {
    pub fn new(n: u32, d: f64, alpha: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::config("n", format!("dimension must be ≥ 2, got {n}")));
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::config("d", format!("inradius must be positive, got {d}")));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::config("alpha", format!("exponent must be positive, got {alpha}")));
        }
        let nf = n as f64;
        let omega = sphere_area(n)?;
        let alpha_n = trudinger_moser_constant(n)?;
        Ok(ProblemConfig {
            n,
            d,
            alpha,
            n_prime: nf / (nf - 1.0),
            omega,
            alpha_n,
            kappa: (nf / d).powi(n as i32) / factorial(n),
            t0: (alpha_n / alpha).powf((nf - 1.0) / nf),
        })
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    /// Volume of the ball `B_d(0)`, `ω_{N-1} d^N / N`.
    pub fn ball_volume(&self) -> f64 {
        self.omega * self.d.powi(self.n as i32) / self.nf()
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        ProblemConfig::new(self.n, self.d, alpha)
    }
}

/// `(1/N)(α_N/α)^{N-1}`: nonzero Palais–Smale levels strictly below this
/// bound produce nontrivial weak limits.
pub fn ps_level_bound(cfg: &ProblemConfig) -> f64 {
    (cfg.alpha_n / cfg.alpha).powi(cfg.n as i32 - 1) / cfg.nf()
}

/// `t - t^{N'}` written as `t (1 - t^{1/(N-1)})` and evaluated with `expm1`
/// so that the layer at `t = 1` keeps full relative accuracy.
fn layer_exponent(n: u32, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    -t * (t.ln() / (n as f64 - 1.0)).exp_m1()
}

fn layer_breaks(n: u32, scale: f64) -> Vec<f64> {
    // Geometric breakpoints resolving the O(1/n) layer at 0 and the
    // O((N-1)/n) layer at 1.
    let left = 1.0 / scale;
    let right = (n as f64 - 1.0) / scale;
    let mut pts = vec![0.0];
    let mut w = left;
    while w < 0.25 {
        pts.push(w);
        w *= 4.0;
    }
    pts.push(0.5);
    let mut tail = Vec::new();
    let mut w = right;
    while w < 0.25 {
        tail.push(1.0 - w);
        w *= 4.0;
    }
    tail.reverse();
    pts.extend(tail);
    pts.push(1.0);
    pts
}

/// `∫_0^1 n e^{-n(t - t^{N'})} dt` to relative accuracy `rel_tol`.
pub fn moser_limit_integral_tol(n: u32, scale: f64, rel_tol: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain(format!("dimension N = {n} must be at least 2")));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::domain(format!("n must be positive, got {scale}")));
    }
    let f = |t: f64| scale * (-scale * layer_exponent(n, t)).exp();
    let opts = QuadOptions {
        rel_tol,
        abs_tol: 0.0,
        max_intervals: 20_000,
    };
    Ok(integrate_with_breaks(f, &layer_breaks(n, scale), opts)?.value)
}

/// `∫_0^1 n e^{-n(t - t^{N'})} dt` with relative error ≤ 1e-10.
pub fn moser_limit_integral(n: u32, scale: f64) -> Result<f64> {
    moser_limit_integral_tol(n, scale, 1e-12)
}

/// Extrapolated limit `𝓜` together with its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoserLimit {
    pub value: f64,
    /// Difference of the two best extrapolants on the last row.
    pub error: f64,
    /// Raw integrals at `n = 10^2, …, 10^7`.
    pub samples: Vec<(f64, f64)>,
    /// Observed decay exponent `p` in `I(n) - 𝓜 ~ n^{-p}`, from the last raw differences.
    pub observed_rate: f64,
}

pub const MOSER_LIMIT_EXPONENTS: std::ops::RangeInclusive<i32> = 2..=7;

/// Richardson extrapolation of [`moser_limit_integral`] along `n_k = 10^k`,
/// `k = 2..7`.
///
/// The endpoint layer at `t = 0` produces corrections in powers of
/// `n^{-1/(N-1)}` (from `e^{n t^{N'}}` with `t ~ 1/n`), the layer at `t = 1`
/// in powers of `1/n`. Both are integer powers of `h = n^{-1/(N-1)}`, so the
/// table eliminates successive powers of `h`. For `N = 2` this is the plain
/// `1/n` table.
pub fn moser_limit_constant(n: u32, tol: f64) -> Result<MoserLimit> {
    if !(tol >= 1e-8) {
        return Err(Error::domain(format!("tolerance must be ≥ 1e-8, got {tol}")));
    }
    let samples: Vec<(f64, f64)> = MOSER_LIMIT_EXPONENTS
        .map(|k| {
            let scale = 10f64.powi(k);
            moser_limit_integral(n, scale).map(|v| (scale, v))
        })
        .collect::<Result<_>>()?;

    let ratio = 10f64.powf(1.0 / (n as f64 - 1.0));
    let rows = samples.len();
    let max_cols = rows;
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(rows);
    for (i, &(_, v)) in samples.iter().enumerate() {
        let mut row = vec![v];
        for m in 1..=i.min(max_cols - 1) {
            let prev: &Vec<f64> = &table[i - 1];
            let factor = ratio.powi(m as i32) - 1.0;
            row.push(row[m - 1] + (row[m - 1] - prev[m - 1]) / factor);
        }
        table.push(row);
    }

    let last = &table[rows - 1];
    let prev = &table[rows - 2];
    let (value, error) = (0..prev.len())
        .map(|m| (last[m], (last[m] - prev[m]).abs()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("table has at least one column");

    let d1 = samples[rows - 3].1 - samples[rows - 2].1;
    let d2 = samples[rows - 2].1 - samples[rows - 1].1;
    let observed_rate = (d1 / d2).abs().log10();

    if !(error <= tol) {
        return Err(Error::Convergence {
            what: format!("Richardson extrapolation of 𝓜 for N = {n}"),
            best: value,
            error,
        });
    }
    Ok(MoserLimit {
        value,
        error,
        samples,
        observed_rate,
    })
}

/// `𝓜(N)` at tolerance 1e-3, memoized per dimension.
pub fn moser_limit_value(n: u32) -> Result<f64> {
    static CACHE: OnceLock<Mutex<HashMap<u32, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().expect("cache lock").get(&n) {
        return Ok(*v);
    }
    let v = moser_limit_constant(n, 1e-3)?.value;
    cache.lock().expect("cache lock").insert(n, v);
    Ok(v)
}

/// Right-hand side of the Theorem 1.1 condition on β, given `𝓜`:
/// `(1/(𝓜 α^{N-1})) (N/d)^N e^{σ₀/((N-1)κ)}`.
pub fn theorem11_threshold_with(cfg: &ProblemConfig, sigma0: f64, moser_limit: f64) -> Result<f64> {
    if !(sigma0 >= 0.0) {
        return Err(Error::domain(format!("σ₀ must be ≥ 0, got {sigma0}")));
    }
    let nf = cfg.nf();
    Ok(corollary12_threshold_with(cfg, moser_limit) * (sigma0 / ((nf - 1.0) * cfg.kappa)).exp())
}

pub fn theorem11_threshold(cfg: &ProblemConfig, sigma0: f64) -> Result<f64> {
    theorem11_threshold_with(cfg, sigma0, moser_limit_value(cfg.n)?)
}

/// `σ₀ = 0` specialization: `(1/(𝓜 α^{N-1})) (N/d)^N`.
pub fn corollary12_threshold_with(cfg: &ProblemConfig, moser_limit: f64) -> f64 {
    let n = cfg.n as i32;
    (cfg.nf() / cfg.d).powi(n) / (moser_limit * cfg.alpha.powi(n - 1))
}

pub fn corollary12_threshold(cfg: &ProblemConfig) -> Result<f64> {
    Ok(corollary12_threshold_with(cfg, moser_limit_value(cfg.n)?))
}

/// The computable factors of the Theorem 1.3 threshold
/// `β > (1/α^{N-1}) (N/d)^N e^{c/σ₀^{N-1}}`. The constant `c` depends on Ω, α
/// and k in an unspecified way, so the threshold itself is not evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Theorem13Structure {
    pub alpha_pow: f64,
    pub n_over_d_pow: f64,
    /// `(1/α^{N-1}) (N/d)^N`, the factor multiplying `e^{c/σ₀^{N-1}}`.
    pub prefactor: f64,
    pub constant_c_known: bool,
}

pub fn theorem13_structure(cfg: &ProblemConfig) -> Theorem13Structure {
    let n = cfg.n as i32;
    let alpha_pow = cfg.alpha.powi(n - 1);
    let n_over_d_pow = (cfg.nf() / cfg.d).powi(n);
    Theorem13Structure {
        alpha_pow,
        n_over_d_pow,
        prefactor: n_over_d_pow / alpha_pow,
        constant_c_known: false,
    }
}
