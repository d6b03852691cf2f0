//! The nonlinearity `h`, the right-hand side `f(t) = h(t) e^{α|t|^{N'}}`, its
//! primitive `G`, and sampled checks of the growth hypotheses.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constants::{theorem11_threshold, theorem13_structure, ProblemConfig, Theorem13Structure};
use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};

/// Exponent guard: `f` saturates once `α|t|^{N'}` exceeds this.
pub const EXP_GUARD: f64 = 700.0;

/// Built-in families for `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Nonlinearity {
    /// `h(t) = β₀ sign(t) |t|^p / (1 + |t|^{p+1})`, so that `t h(t) → β₀`.
    Rational { beta0: f64, p: f64 },
    /// Monotone cubic (Fritsch–Carlson) interpolant through `(knots, values)`.
    ///
    /// Outside the knot hull the tail `h(t) = h(t_end) t_end / t` is used, so
    /// `h → 0` and `t h(t)` tends to `t_end h(t_end)`. If all knots are
    /// non-negative the table is extended as an odd function.
    Tabulated {
        knots: Vec<f64>,
        values: Vec<f64>,
        #[serde(skip)]
        slopes: Vec<f64>,
    },
}

impl Nonlinearity {
    pub fn rational(beta0: f64, p: f64) -> Result<Self> {
        let nl = Nonlinearity::Rational { beta0, p };
        nl.validate()?;
        Ok(nl)
    }

    pub fn tabulated(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let mut nl = Nonlinearity::Tabulated {
            knots,
            values,
            slopes: Vec::new(),
        };
        nl.validate()?;
        if let Nonlinearity::Tabulated { knots, values, slopes } = &mut nl {
            *slopes = pchip_slopes(knots, values);
        }
        Ok(nl)
    }

    /// Samples `h` on `knots` and tabulates it.
    pub fn tabulate<F: Fn(f64) -> f64>(h: F, knots: Vec<f64>) -> Result<Self> {
        let values = knots.iter().map(|&t| h(t)).collect();
        Nonlinearity::tabulated(knots, values)
    }

    /// Reads a two-column `(t, h)` CSV. A non-numeric first row is taken as a header.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)?;
        let mut knots = Vec::new();
        let mut values = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() < 2 {
                return Err(Error::config("nonlinearity.csv", format!("row {i} has fewer than two columns")));
            }
            match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
                (Ok(t), Ok(h)) => {
                    knots.push(t);
                    values.push(h);
                }
                _ if i == 0 => continue,
                _ => return Err(Error::config("nonlinearity.csv", format!("row {i} is not numeric"))),
            }
        }
        Nonlinearity::tabulated(knots, values)
    }

    /// Rebuilds derived interpolation data, e.g. after deserialization.
    pub fn prepared(self) -> Result<Self> {
        match self {
            Nonlinearity::Tabulated { knots, values, .. } => Nonlinearity::tabulated(knots, values),
            nl => {
                nl.validate()?;
                Ok(nl)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Nonlinearity::Rational { beta0, p } => {
                if !beta0.is_finite() {
                    return Err(Error::config("nonlinearity.beta0", "must be finite"));
                }
                if !(*p > 0.0 && p.is_finite()) {
                    return Err(Error::config("nonlinearity.p", format!("must be positive, got {p}")));
                }
            }
            Nonlinearity::Tabulated { knots, values, .. } => {
                if knots.len() < 2 || knots.len() != values.len() {
                    return Err(Error::config(
                        "nonlinearity.knots",
                        "need at least two knots and one value per knot",
                    ));
                }
                if knots.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::config("nonlinearity.knots", "knots must be strictly increasing"));
                }
                if knots.iter().chain(values.iter()).any(|v| !v.is_finite()) {
                    return Err(Error::config("nonlinearity.values", "entries must be finite"));
                }
                if *knots.last().expect("len ≥ 2") <= 0.0 {
                    return Err(Error::config("nonlinearity.knots", "table must extend to t > 0"));
                }
            }
        }
        Ok(())
    }

    /// True when `h(-t) = -h(t)` holds by construction.
    pub fn is_odd(&self) -> bool {
        match self {
            Nonlinearity::Rational { .. } => true,
            Nonlinearity::Tabulated { knots, .. } => knots[0] >= 0.0,
        }
    }

    /// True when evaluating at `t` leaves the knot hull of a table.
    pub fn extrapolates(&self, t: f64) -> bool {
        match self {
            Nonlinearity::Rational { .. } => false,
            Nonlinearity::Tabulated { knots, .. } => {
                let t = if knots[0] >= 0.0 { t.abs() } else { t };
                t < knots[0] || t > knots[knots.len() - 1]
            }
        }
    }

    /// `h(t)`.
    pub fn h(&self, t: f64) -> f64 {
        match self {
            Nonlinearity::Rational { beta0, p } => {
                let a = t.abs();
                if a == 0.0 {
                    return 0.0;
                }
                beta0 * t.signum() * a.powf(*p) / (1.0 + a.powf(p + 1.0))
            }
            Nonlinearity::Tabulated { knots, values, slopes } => {
                if knots[0] >= 0.0 && t < 0.0 {
                    return -table_eval(knots, values, slopes, -t).0;
                }
                table_eval(knots, values, slopes, t).0
            }
        }
    }

    /// `h'(t)`.
    pub fn dh(&self, t: f64) -> f64 {
        match self {
            Nonlinearity::Rational { beta0, p } => {
                let a = t.abs();
                let q = 1.0 + a.powf(p + 1.0);
                if a == 0.0 {
                    return if *p > 1.0 {
                        0.0
                    } else if *p == 1.0 {
                        *beta0
                    } else {
                        f64::INFINITY * beta0.signum()
                    };
                }
                beta0 * a.powf(p - 1.0) * (p - a.powf(p + 1.0)) / (q * q)
            }
            Nonlinearity::Tabulated { knots, values, slopes } => {
                if knots[0] >= 0.0 && t < 0.0 {
                    return table_eval(knots, values, slopes, -t).1;
                }
                table_eval(knots, values, slopes, t).1
            }
        }
    }
}

/// Fritsch–Carlson monotone slopes with the shape-preserving three-point end rule.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let del: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    let mut m = vec![0.0; n];
    if n == 2 {
        m[0] = del[0];
        m[1] = del[0];
        return m;
    }
    for k in 1..n - 1 {
        if del[k - 1] * del[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            m[k] = (w1 + w2) / (w1 / del[k - 1] + w2 / del[k]);
        }
    }
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s.signum() != d0.signum() {
            0.0
        } else if d0.signum() != d1.signum() && s.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            s
        }
    };
    m[0] = end(h[0], h[1], del[0], del[1]);
    m[n - 1] = end(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
    m
}

/// Value and derivative of the table (with decaying tails) at `t`.
fn table_eval(x: &[f64], y: &[f64], m: &[f64], t: f64) -> (f64, f64) {
    let n = x.len();
    if t > x[n - 1] {
        let c = y[n - 1] * x[n - 1];
        return (c / t, -c / (t * t));
    }
    if t < x[0] {
        if x[0] < 0.0 {
            let c = y[0] * x[0];
            return (c / t, -c / (t * t));
        }
        // Only reachable for odd tables between 0 and the first knot: linear to the origin.
        let s = y[0] / x[0];
        return (s * t, s);
    }
    let k = match x.binary_search_by(|v| v.total_cmp(&t)) {
        Ok(i) => i.min(n - 2),
        Err(i) => i - 1,
    };
    let h = x[k + 1] - x[k];
    let s = (t - x[k]) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let v = h00 * y[k] + h10 * h * m[k] + h01 * y[k + 1] + h11 * h * m[k + 1];
    let d00 = (6.0 * s2 - 6.0 * s) / h;
    let d10 = 3.0 * s2 - 4.0 * s + 1.0;
    let d01 = (-6.0 * s2 + 6.0 * s) / h;
    let d11 = 3.0 * s2 - 2.0 * s;
    let dv = d00 * y[k] + d10 * m[k] + d01 * y[k + 1] + d11 * m[k + 1];
    (v, dv)
}

/// `h(t)`.
pub fn h_value(nl: &Nonlinearity, t: f64) -> f64 {
    nl.h(t)
}

/// Largest `|t|` for which `α|t|^{N'} ≤ 700`.
pub fn overflow_radius(cfg: &ProblemConfig) -> f64 {
    (EXP_GUARD / cfg.alpha).powf(1.0 / cfg.n_prime)
}

fn exp_weight(cfg: &ProblemConfig, t: f64) -> Option<f64> {
    let x = cfg.alpha * t.abs().powf(cfg.n_prime);
    (x <= EXP_GUARD).then(|| x.exp())
}

/// `f(t) = h(t) e^{α|t|^{N'}}`. Returns a signed infinity once the exponent
/// guard trips; callers detect saturation with `is_infinite`.
pub fn f_value(nl: &Nonlinearity, cfg: &ProblemConfig, t: f64) -> f64 {
    let h = nl.h(t);
    match exp_weight(cfg, t) {
        Some(w) => h * w,
        None if h == 0.0 => 0.0,
        None => f64::INFINITY * h.signum(),
    }
}

/// `f'(t) = (h'(t) + α N' |t|^{N'-2} t h(t)) e^{α|t|^{N'}}`.
pub fn df_value(nl: &Nonlinearity, cfg: &ProblemConfig, t: f64) -> f64 {
    let Some(w) = exp_weight(cfg, t) else {
        return f64::INFINITY;
    };
    let a = t.abs();
    let chain = if a == 0.0 {
        0.0
    } else {
        cfg.alpha * cfg.n_prime * a.powf(cfg.n_prime - 1.0) * t.signum() * nl.h(t)
    };
    (nl.dh(t) + chain) * w
}

fn saturated_primitive(nl: &Nonlinearity, t: f64) -> f64 {
    // G grows without bound with the sign of t h(t).
    let s = (t * nl.h(t)).signum();
    if s == 0.0 {
        0.0
    } else {
        f64::INFINITY * s
    }
}

fn primitive_panel(nl: &Nonlinearity, cfg: &ProblemConfig, a: f64, b: f64, scale: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let opts = QuadOptions {
        rel_tol: 1e-13,
        abs_tol: 1e-15 * scale.max(1.0),
        max_intervals: 2000,
    };
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    // Split at 0, where |s|^{N'} is not smooth.
    let integrand = |s: f64| f_value(nl, cfg, s);
    let v = if lo < 0.0 && hi > 0.0 {
        integrate(integrand, lo, 0.0, opts)?.value + integrate(integrand, 0.0, hi, opts)?.value
    } else {
        integrate(integrand, lo, hi, opts)?.value
    };
    Ok(sign * v)
}

/// `G(t) = ∫_0^t h(s) e^{α|s|^{N'}} ds` by direct adaptive quadrature.
pub fn g_value(nl: &Nonlinearity, cfg: &ProblemConfig, t: f64) -> Result<f64> {
    if t.abs() > overflow_radius(cfg) {
        return Ok(saturated_primitive(nl, t));
    }
    primitive_panel(nl, cfg, 0.0, t, 1.0)
}

/// Spacing of the cached lattice for `G`.
pub const LATTICE_STEP: f64 = 1e-2;

/// `h`, `f`, `f'` and a lattice-cached `G` for one `(h, N, α)`.
///
/// `G` is tabulated at `k·Δ` for `|k Δ| ≤ T` when the value is built; a query
/// integrates from the nearest lattice node. The table is immutable afterwards,
/// so concurrent evaluation is deterministic.
#[derive(Debug, Clone)]
pub struct Primitive {
    nl: Nonlinearity,
    cfg: ProblemConfig,
    extent: f64,
    pos: Vec<f64>,
    neg: Vec<f64>,
}

impl Primitive {
    /// Default lattice extent: up to the overflow radius, capped at 64.
    pub fn new(nl: &Nonlinearity, cfg: &ProblemConfig) -> Result<Self> {
        Primitive::with_extent(nl, cfg, 64.0)
    }

    pub fn with_extent(nl: &Nonlinearity, cfg: &ProblemConfig, extent: f64) -> Result<Self> {
        if !(extent > 0.0) {
            return Err(Error::config("lattice_extent", "must be positive"));
        }
        let extent = extent.min(overflow_radius(cfg));
        let count = (extent / LATTICE_STEP).floor() as usize;
        let build = |sign: f64| -> Result<Vec<f64>> {
            let mut vals = Vec::with_capacity(count + 1);
            vals.push(0.0);
            let mut acc: f64 = 0.0;
            for k in 1..=count {
                let a = sign * (k - 1) as f64 * LATTICE_STEP;
                let b = sign * k as f64 * LATTICE_STEP;
                acc += primitive_panel(nl, cfg, a, b, acc.abs())?;
                vals.push(acc);
            }
            Ok(vals)
        };
        Ok(Primitive {
            nl: nl.clone(),
            cfg: *cfg,
            extent: count as f64 * LATTICE_STEP,
            pos: build(1.0)?,
            neg: build(-1.0)?,
        })
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nl
    }

    pub fn config(&self) -> &ProblemConfig {
        &self.cfg
    }

    pub fn h(&self, t: f64) -> f64 {
        self.nl.h(t)
    }

    pub fn f(&self, t: f64) -> f64 {
        f_value(&self.nl, &self.cfg, t)
    }

    pub fn df(&self, t: f64) -> f64 {
        df_value(&self.nl, &self.cfg, t)
    }

    /// Cached `G(t)`; infinite once `α|t|^{N'} > 700`.
    pub fn g(&self, t: f64) -> f64 {
        if t.abs() > overflow_radius(&self.cfg) {
            return saturated_primitive(&self.nl, t);
        }
        let (table, sign) = if t >= 0.0 { (&self.pos, 1.0) } else { (&self.neg, -1.0) };
        let k = ((t.abs() / LATTICE_STEP).round() as usize).min(table.len() - 1);
        let node = sign * k as f64 * LATTICE_STEP;
        let base = table[k];
        match primitive_panel(&self.nl, &self.cfg, node, t, base.abs()) {
            Ok(v) => base + v,
            Err(_) => g_value(&self.nl, &self.cfg, t).unwrap_or(f64::NAN),
        }
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }
}

/// Liminf estimate of `t h(t)` from a geometric tail window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaEstimate {
    /// `min` of both tail minima.
    pub beta: f64,
    pub positive_tail_min: f64,
    pub negative_tail_min: f64,
    /// `max |h|` over the window, a diagnostic for `h → 0`.
    pub tail_sup_abs_h: f64,
}

/// Minimum of `t h(t)` over `±[t_max/2, t_max]`, sampled geometrically.
/// Exact for the built-in rational family, whose `t h(t)` is monotone in `|t|`.
pub fn beta_estimate(nl: &Nonlinearity, t_max: f64, samples: usize) -> Result<BetaEstimate> {
    if !(t_max >= 1e2) {
        return Err(Error::domain(format!("t_max must be ≥ 100, got {t_max}")));
    }
    if samples < 1000 {
        return Err(Error::domain(format!("need at least 1000 samples, got {samples}")));
    }
    let lo = 0.5 * t_max;
    let ratio = (t_max / lo).powf(1.0 / (samples - 1) as f64);
    let mut pos = f64::INFINITY;
    let mut neg = f64::INFINITY;
    let mut sup_h: f64 = 0.0;
    for i in 0..samples {
        let t = if i == samples - 1 { t_max } else { lo * ratio.powi(i as i32) };
        let hp = nl.h(t);
        let hn = nl.h(-t);
        pos = pos.min(t * hp);
        neg = neg.min(-t * hn);
        sup_h = sup_h.max(hp.abs()).max(hn.abs());
    }
    Ok(BetaEstimate {
        beta: pos.min(neg),
        positive_tail_min: pos,
        negative_tail_min: neg,
        tail_sup_abs_h: sup_h,
    })
}

/// Sample points for the hypothesis checks: geometric on `[t_min, t_split]`,
/// uniform on `[t_split, t_max]`, mirrored to negative `t` where needed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SampleGrid {
    pub t_min: f64,
    pub t_split: f64,
    pub t_max: f64,
    pub n_geometric: usize,
    pub n_linear: usize,
    /// Tail window end for the β estimate.
    pub beta_t_max: f64,
    pub beta_samples: usize,
}

impl Default for SampleGrid {
    fn default() -> Self {
        SampleGrid {
            t_min: 1e-4,
            t_split: 1.0,
            t_max: 10.0,
            n_geometric: 200,
            n_linear: 400,
            beta_t_max: 1e4,
            beta_samples: 2000,
        }
    }
}

impl SampleGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_min > 0.0 && self.t_min < self.t_split && self.t_split < self.t_max) {
            return Err(Error::config("grid", "need 0 < t_min < t_split < t_max"));
        }
        if self.n_geometric < 2 || self.n_linear < 2 {
            return Err(Error::config("grid", "need at least two points per segment"));
        }
        Ok(())
    }

    /// Positive sample points, increasing; `t_max` is clipped to the overflow radius.
    pub fn points(&self, cfg: &ProblemConfig) -> Vec<f64> {
        let t_max = self.t_max.min(0.999 * overflow_radius(cfg));
        let t_split = self.t_split.min(0.5 * t_max);
        let t_min = self.t_min.min(0.5 * t_split);
        let r = (t_split / t_min).powf(1.0 / (self.n_geometric - 1) as f64);
        let mut pts: Vec<f64> = (0..self.n_geometric).map(|i| t_min * r.powi(i as i32)).collect();
        let step = (t_max - t_split) / (self.n_linear - 1) as f64;
        pts.extend((1..self.n_linear).map(|i| t_split + i as f64 * step));
        pts
    }
}

/// Sampled verdicts for the hypotheses of the existence theorems.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub beta_est: f64,
    /// `0 < β` as estimated.
    pub beta_positive: bool,
    /// Smallest `σ₀ ≥ 0` with `G(t) ≥ -(σ₀/N) t^N` on the sampled `t ≥ 0`.
    /// For Theorem 1.3 this is `min (N G(t)/|t|^N - λ_{k-1})` over all samples.
    pub sigma0_max: f64,
    /// `(σ₁, δ)` with `G(t) ≤ ((λ - σ₁)/N)|t|^N` on sampled `|t| ≤ δ`.
    pub sigma1_delta: Option<(f64, f64)>,
    /// Theorem 1.1 right-hand side at `σ₀`; `None` for Theorem 1.3, whose constant is unknown.
    pub threshold: Option<f64>,
    pub satisfied: bool,
    pub theorem13: Option<Theorem13Structure>,
    /// `true` when the lower bound of Theorem 1.3 holds with `σ₀ > 0` on the samples.
    pub lower_bound_holds: bool,
    pub tail_extrapolated: bool,
    pub grid_spec: SampleGrid,
    pub kind: &'static str,
}

pub const CERTIFICATE_KIND: &str = "sampled certificate";

struct Samples {
    ts: Vec<f64>,
    q: Vec<f64>,
}

/// `q(t) = N G(t)/|t|^N` on the grid and its mirror, ordered by `|t|`.
fn ratio_samples(prim: &Primitive, grid: &SampleGrid, both_signs: bool) -> Samples {
    let cfg = prim.config();
    let n = cfg.n as i32;
    let mut ts = Vec::new();
    let mut q = Vec::new();
    for t in grid.points(cfg) {
        let signs: &[f64] = if both_signs { &[1.0, -1.0] } else { &[1.0] };
        for &s in signs {
            let x = s * t;
            ts.push(x);
            q.push(cfg.nf() * prim.g(x) / t.powi(n));
        }
    }
    Samples { ts, q }
}

/// `(σ₁, δ)` for `G ≤ ((λ - σ₁)/N)|t|^N` near 0. The window is grown while the
/// running max of `q` stays below the midpoint of `q` at the smallest scale and `λ`.
fn upper_certificate(s: &Samples, lambda: f64) -> Option<(f64, f64)> {
    let q0 = s.q.iter().zip(&s.ts).take(2).map(|(q, _)| *q).fold(f64::NEG_INFINITY, f64::max);
    if !(q0 < lambda) {
        return None;
    }
    let cap = 0.5 * (q0 + lambda);
    let mut running = f64::NEG_INFINITY;
    let mut best = None;
    for (i, (&t, &q)) in s.ts.iter().zip(&s.q).enumerate() {
        running = running.max(q);
        if !(running <= cap) {
            break;
        }
        // Only close the window after both signs at this |t| are in.
        let last_of_pair = i + 1 == s.ts.len() || s.ts[i + 1].abs() != t.abs();
        if last_of_pair {
            best = Some((lambda - running, t.abs()));
        }
    }
    best.filter(|(sigma1, _)| *sigma1 > 0.0)
}

/// Checks `(1.9)`, `(1.7)` and evaluates the Theorem 1.1 threshold at the sampled `σ₀`.
pub fn check_hypotheses_thm11(
    nl: &Nonlinearity,
    cfg: &ProblemConfig,
    lambda1: f64,
    grid: &SampleGrid,
) -> Result<HypothesisReport> {
    let prim = Primitive::new(nl, cfg)?;
    check_hypotheses_thm11_with(&prim, lambda1, grid)
}

pub fn check_hypotheses_thm11_with(prim: &Primitive, lambda1: f64, grid: &SampleGrid) -> Result<HypothesisReport> {
    if !(lambda1 > 0.0) {
        return Err(Error::domain(format!("λ₁ must be positive, got {lambda1}")));
    }
    grid.validate()?;
    let cfg = prim.config();
    let nl = prim.nonlinearity();
    let beta = beta_estimate(nl, grid.beta_t_max, grid.beta_samples)?;

    let positive = ratio_samples(prim, grid, false);
    let sigma0 = positive.q.iter().fold(0.0f64, |acc, &q| acc.max(-q));

    let both = ratio_samples(prim, grid, true);
    let sigma1_delta = upper_certificate(&both, lambda1);

    let threshold = theorem11_threshold(cfg, sigma0)?;
    Ok(HypothesisReport {
        beta_est: beta.beta,
        beta_positive: beta.beta > 0.0,
        sigma0_max: sigma0,
        sigma1_delta,
        threshold: Some(threshold),
        satisfied: beta.beta > threshold && sigma1_delta.is_some(),
        theorem13: None,
        lower_bound_holds: true,
        tail_extrapolated: nl.extrapolates(grid.beta_t_max),
        grid_spec: *grid,
        kind: CERTIFICATE_KIND,
    })
}

/// Checks `(1.11)` globally and `(1.12)` near 0 for user-supplied
/// `λ_{k-1} < λ_k`. The threshold constant is unknown, so `satisfied` only
/// reflects the sampled inequalities and `β > 0`.
pub fn check_hypotheses_thm13(
    nl: &Nonlinearity,
    cfg: &ProblemConfig,
    lambda_km1: f64,
    lambda_k: f64,
    grid: &SampleGrid,
) -> Result<HypothesisReport> {
    if !(lambda_km1 > 0.0 && lambda_k > lambda_km1) {
        return Err(Error::domain(format!(
            "need 0 < λ_(k-1) < λ_k, got {lambda_km1} and {lambda_k}"
        )));
    }
    grid.validate()?;
    let prim = Primitive::new(nl, cfg)?;
    let beta = beta_estimate(nl, grid.beta_t_max, grid.beta_samples)?;
    let both = ratio_samples(&prim, grid, true);
    let sigma0 = both.q.iter().fold(f64::INFINITY, |acc, &q| acc.min(q - lambda_km1));
    let sigma1_delta = upper_certificate(&both, lambda_k);
    let lower_bound_holds = sigma0 > 0.0;
    Ok(HypothesisReport {
        beta_est: beta.beta,
        beta_positive: beta.beta > 0.0,
        sigma0_max: sigma0,
        sigma1_delta,
        threshold: None,
        satisfied: beta.beta > 0.0 && lower_bound_holds && sigma1_delta.is_some(),
        theorem13: Some(theorem13_structure(cfg)),
        lower_bound_holds,
        tail_extrapolated: nl.extrapolates(grid.beta_t_max),
        grid_spec: *grid,
        kind: CERTIFICATE_KIND,
    })
}
