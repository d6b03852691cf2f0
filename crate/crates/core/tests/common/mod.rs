//! Reference computations that share no code with the library: adaptive
//! Simpson, composite Gauss–Legendre, the Bessel `J₀` series and bisection.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Adaptive Simpson with the Richardson correction, absolute tolerance `tol`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
    if depth == 0 || diff.abs() <= 15.0 * tol.max(floor) {
        return left + right + diff / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Nodes and weights of the `k`-point Gauss–Legendre rule on `[-1, 1]`,
/// by Newton iteration on `P_k`.
pub fn gauss_legendre_rule(k: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(k);
    for i in 0..k {
        let mut x = (PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for n in 2..=k {
                let p2 = ((2 * n - 1) as f64 * x * p1 - (n - 1) as f64 * p0) / n as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = k as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    rule
}

/// Composite Gauss–Legendre over consecutive `breaks`, each piece split into `panels`.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: &F, breaks: &[f64], panels: usize, order: usize) -> f64 {
    let rule = gauss_legendre_rule(order);
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let h = (w[1] - w[0]) / panels as f64;
        for p in 0..panels {
            let (a, b) = (w[0] + p as f64 * h, w[0] + (p + 1) as f64 * h);
            let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
            total += rule.iter().map(|(x, wt)| wt * f(c + r * x)).sum::<f64>() * r;
        }
    }
    total
}

/// `J₀(x)` by its power series; accurate for `x ≲ 10`.
pub fn bessel_j0(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..80 {
        term *= q / (k * k) as f64;
        sum += term;
    }
    sum
}

pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    assert!(fa * f(b) < 0.0, "no sign change");
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        if (f(m) < 0.0) == (fa < 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// First positive zero of `J₀`.
pub fn bessel_j0_first_zero() -> f64 {
    bisect(bessel_j0, 2.0, 3.0)
}

/// `Γ(k/2)` by the recursions from `Γ(1) = 1` and `Γ(1/2) = √π`.
pub fn gamma_half(k: u32) -> f64 {
    let (mut g, mut x) = if k % 2 == 0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    while x < k as f64 / 2.0 {
        g *= x;
        x += 1.0;
    }
    g
}

pub fn sphere_area(n: u32) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n)
}

/// `∫₀¹ s e^{-s(t - t^{N/(N-1)})} dt` by composite Gauss–Legendre on panels
/// graded toward both endpoint layers.
pub fn moser_limit_integral(n: u32, s: f64) -> f64 {
    let np = n as f64 / (n as f64 - 1.0);
    let f = |t: f64| s * (-s * (t - t.powf(np))).exp();
    let mut breaks = vec![0.0];
    let mut w = 0.1 / s;
    while w < 0.5 {
        breaks.push(w);
        w *= 2.0;
    }
    breaks.push(0.5);
    let mut right = Vec::new();
    let mut w = 0.1 / s;
    while w < 0.5 {
        right.push(1.0 - w);
        w *= 2.0;
    }
    right.reverse();
    breaks.extend(right);
    breaks.push(1.0);
    gauss_legendre(&f, &breaks, 4, 20)
}

/// Moser function `ω_j(r)` on `B_d` in `N` dimensions, written out independently.
pub fn moser(n: u32, d: f64, j: f64, r: f64) -> f64 {
    let nf = n as f64;
    let w = sphere_area(n);
    if r >= d {
        0.0
    } else if r <= d / j {
        j.ln().powf((nf - 1.0) / nf) / w.powf(1.0 / nf)
    } else {
        (d / r).ln() / (w * j.ln()).powf(1.0 / nf)
    }
}

pub fn moser_slope(n: u32, d: f64, j: f64, r: f64) -> f64 {
    let nf = n as f64;
    if r >= d || r <= d / j {
        0.0
    } else {
        1.0 / ((sphere_area(n) * j.ln()).powf(1.0 / nf) * r)
    }
}

/// `∫_{B_d} ω_j^m dx` by adaptive Simpson, split at the knee.
pub fn moser_moment(n: u32, d: f64, j: f64, m: u32) -> f64 {
    let w = sphere_area(n);
    let f = |r: f64| moser(n, d, j, r).powi(m as i32) * r.powi(n as i32 - 1);
    let knee = d / j;
    w * (simpson(&f, 0.0, knee, 1e-16) + simpson(&f, knee, d, 1e-15))
}

/// `∫_{B_d} |∇ω_j|^m dx` by adaptive Simpson on the annulus.
pub fn moser_gradient_moment(n: u32, d: f64, j: f64, m: u32) -> f64 {
    let w = sphere_area(n);
    let f = |r: f64| moser_slope(n, d, j, r).powi(m as i32) * r.powi(n as i32 - 1);
    w * simpson(&f, d / j, d, 1e-15)
}

/// `∫_{1/j}^1 (-log s)^m s^{N-1} ds` by adaptive Simpson.
pub fn recurrence_integral(j: f64, n: u32, m: u32) -> f64 {
    simpson(&|s: f64| (-s.ln()).powi(m as i32) * s.powi(n as i32 - 1), 1.0 / j, 1.0, 1e-16)
}

/// Central finite difference of `e` along the unit vector `i`.
pub fn central_difference<E: Fn(&[f64]) -> f64>(e: &E, x: &[f64], i: usize, eps: f64) -> f64 {
    let mut p = x.to_vec();
    let mut m = x.to_vec();
    p[i] += eps;
    m[i] -= eps;
    (e(&p) - e(&m)) / (2.0 * eps)
}

/// `G(t) = ∫₀ᵗ h(s) e^{α|s|^{N'}} ds` for the rational family, by adaptive Simpson.
pub fn rational_primitive(beta0: f64, p: f64, alpha: f64, n: u32, t: f64) -> f64 {
    let np = n as f64 / (n as f64 - 1.0);
    let f = |s: f64| {
        let a = s.abs();
        beta0 * s.signum() * a.powf(p) / (1.0 + a.powf(p + 1.0)) * (alpha * a.powf(np)).exp()
    };
    simpson(&f, 0.0, t, 1e-15)
}
