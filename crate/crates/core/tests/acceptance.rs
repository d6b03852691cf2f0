//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tm_critical::constants::*;
use tm_critical::eigen::first_eigenpair;
use tm_critical::moser::*;
use tm_critical::mountain_pass::*;
use tm_critical::nonlinearity::*;
use tm_critical::radial::*;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err(format!($($arg)+));
        }
    };
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn cfg(n: u32, d: f64, alpha: f64) -> ProblemConfig {
    ProblemConfig::new(n, d, alpha).unwrap()
}

/// Closed-form Moser moments against adaptive Simpson.
fn moser_sweep() -> Check {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for n in 2..=4 {
        let c = cfg(n, 1.0, 1.0);
        for j in [2.0, 10.0, 100.0] {
            let mf = MoserFunction::new(&c, j).map_err(|e| e.to_string())?;
            for m in 1..=n {
                let closed = moser_moment_closed(&mf, m).map_err(|e| e.to_string())?;
                let quad = common::moser_moment(n, 1.0, j, m);
                let e = rel(closed, quad);
                ensure!(e <= 1e-8, "N={n} j={j} m={m}: moment rel err {e:e}");
                worst = worst.max(e);

                let closed = moser_gradient_moment_closed(&mf, m).map_err(|e| e.to_string())?;
                let quad = common::moser_gradient_moment(n, 1.0, j, m);
                if m == n {
                    ensure!(closed == 1.0, "N={n} j={j}: gradient moment m=N is {closed}");
                    ensure!((quad - 1.0).abs() <= 1e-10, "N={n} j={j}: quadrature of |∇ω|^N is {quad}");
                } else {
                    let e = rel(closed, quad);
                    ensure!(e <= 1e-8, "N={n} j={j} m={m}: gradient moment rel err {e:e}");
                    worst = worst.max(e);
                }
                cases += 1;
            }
        }
    }
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(10), "runtime {t:?} ≥ 10 s");
    Ok(format!("{cases} cases, max rel err {worst:.1e}, {t:.2?}"))
}

/// `I_m` recurrence against its closed form and direct quadrature.
fn recurrence() -> Check {
    let (mut w_closed, mut w_quad): (f64, f64) = (0.0, 0.0);
    for n in 2..=4 {
        for j in [2.0, 10.0, 100.0] {
            for m in 1..=n {
                let r = recurrence_i(j, n, m).map_err(|e| e.to_string())?;
                let a = rel(r.recurrence, r.closed_form);
                let b = rel(r.recurrence, common::recurrence_integral(j, n, m));
                ensure!(a <= 1e-12, "N={n} j={j} m={m}: vs closed form {a:e}");
                ensure!(b <= 1e-9, "N={n} j={j} m={m}: vs quadrature {b:e}");
                w_closed = w_closed.max(a);
                w_quad = w_quad.max(b);
            }
        }
    }
    Ok(format!("max rel err {w_closed:.1e} (closed), {w_quad:.1e} (quadrature)"))
}

/// Extrapolated limit constant stabilizes and matches `N`.
fn limit_constant() -> Check {
    let start = Instant::now();
    let mut parts = Vec::new();
    for n in 2..=4 {
        let lim = moser_limit_constant(n, 1e-3).map_err(|e| format!("N={n}: {e}"))?;
        ensure!(lim.error <= 1e-3, "N={n}: extrapolants differ by {:e}", lim.error);
        ensure!((lim.value - n as f64).abs() <= 1e-2, "N={n}: limit {} far from {n}", lim.value);
        for &(s, v) in lim.samples.iter().filter(|(s, _)| *s <= 1e5) {
            let o = common::moser_limit_integral(n, s);
            ensure!(rel(v, o) <= 1e-8, "N={n} n={s}: integral {v} vs oracle {o}");
        }
        parts.push(format!("N={n}: {:.6} ± {:.0e}", lim.value, lim.error));
    }
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(30), "runtime {t:?} ≥ 30 s");
    Ok(format!("{}, {t:.2?}", parts.join(", ")))
}

/// Disk eigenvalue against the first Bessel zero, and `d`-scaling.
fn disk_eigenvalue() -> Check {
    let z = common::bessel_j0_first_zero();
    let exact = z * z;
    let solve = |d: f64| -> Result<f64, String> {
        let grid = Arc::new(RadialGrid::graded(&cfg(2, d, 1.0), 1024, 0.97).map_err(|e| e.to_string())?);
        Ok(first_eigenpair(&grid, 1e-11, 20_000).map_err(|e| e.to_string())?.lambda1)
    };
    let l1 = solve(1.0)?;
    let l2 = solve(2.0)?;
    let e1 = rel(l1, exact);
    let e2 = rel(l2, l1 / 4.0);
    ensure!(e1 <= 5e-3, "λ₁ = {l1} vs j₀,₁² = {exact}: {e1:e}");
    ensure!(e2 <= 5e-3, "λ₁(2) = {l2} vs λ₁(1)/4 = {}: {e2:e}", l1 / 4.0);
    Ok(format!("λ₁ = {l1:.6} vs {exact:.6} (rel {e1:.1e}), scaling rel {e2:.1e}"))
}

fn random_function(grid: &Arc<RadialGrid>, rng: &mut ChaCha8Rng) -> RadialFunction {
    let modes: Vec<(f64, f64)> = (0..4).map(|_| (rng.gen_range(-0.6..0.6), rng.gen_range(0.5..6.0))).collect();
    let smooth = RadialFunction::from_fn(grid.clone(), |r| {
        modes.iter().map(|(a, k)| a * (k * r).cos()).sum::<f64>() * (1.0 - r)
    });
    let noise: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-0.05..0.05)).collect();
    smooth.axpy(1.0, &noise)
}

/// Exact discrete gradient against central differences.
fn gradient_fidelity() -> Check {
    let eps = 1e-5;
    let mut worst: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for n in [2, 3] {
        let c = cfg(n, 1.0, 1.0);
        let prim = Primitive::new(&Nonlinearity::rational(20.0, 2.0).unwrap(), &c).map_err(|e| e.to_string())?;
        let grid = Arc::new(RadialGrid::graded(&c, 64, 0.97).map_err(|e| e.to_string())?);
        for k in 0..20 {
            let u = random_function(&grid, &mut rng);
            let g = energy_gradient(&u, &prim);
            let e = |x: &[f64]| energy(&RadialFunction::new(grid.clone(), x.to_vec()).unwrap(), &prim);
            let fd: Vec<f64> = (0..grid.len() - 1)
                .map(|i| common::central_difference(&e, u.values(), i, eps))
                .collect();
            let scale = g.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            let err = fd.iter().zip(&g).fold(0.0f64, |a, (f, g)| a.max((f - g).abs())) / scale;
            ensure!(err <= 1e-6, "N={n} sample {k}: relative mismatch {err:e}");
            worst = worst.max(err);
        }
    }
    Ok(format!("40 functions, max relative mismatch {worst:.1e}"))
}

/// Full existence pipeline on the unit disk.
fn end_to_end(store: &mut Option<RadialFunction>) -> Check {
    let start = Instant::now();
    let c = cfg(2, 1.0, 1.0);
    let threshold = corollary12_threshold(&c).map_err(|e| e.to_string())?;
    let beta0 = 10.0 * threshold;
    let prim = Primitive::new(&Nonlinearity::rational(beta0, 2.0).unwrap(), &c).map_err(|e| e.to_string())?;
    let grid = Arc::new(RadialGrid::graded(&c, 512, 0.97).map_err(|e| e.to_string())?);

    let lambda1 = first_eigenpair(&grid, 1e-10, 20_000).map_err(|e| e.to_string())?.lambda1;
    let hyp = check_hypotheses_thm11_with(&prim, lambda1, &SampleGrid::default()).map_err(|e| e.to_string())?;
    ensure!(hyp.satisfied, "hypothesis check failed: {hyp:?}");

    let bound = ps_level_bound(&c);
    let search = find_j0(&prim, &grid, (2, 1000)).map_err(|e| e.to_string())?;
    let j0 = search.j0.ok_or("no j₀ ≤ 1000")?;
    let sup = search.table.last().unwrap().1;
    ensure!(sup < 0.5 && sup < bound, "sup H_j₀ = {sup} not below 0.5 and {bound}");

    let params = MountainPassParams {
        path_points: 41,
        j0: Some(j0),
        ..Default::default()
    };
    let rep = mountain_pass_solve(&prim, &grid, &params).map_err(|e| e.to_string())?;
    let lp = lp_norm(&rep.u_star, 2.0).map_err(|e| e.to_string())?;
    ensure!(rep.residual < 1e-6, "residual {:e}", rep.residual);
    ensure!(rep.level_c > 0.0 && rep.level_c < 0.5, "level {} outside (0, 0.5)", rep.level_c);
    ensure!(rep.level_c < bound && rep.admissible, "level {} not admissible", rep.level_c);
    ensure!(lp > 0.0, "trivial solution");
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(300), "runtime {t:?} ≥ 5 min");
    *store = Some(rep.u_star.clone());
    Ok(format!(
        "β₀ = {beta0:.4}, j₀ = {j0}, sup = {sup:.4}, c = {:.6}, residual {:.1e}, ‖u*‖₂ = {lp:.4}, {t:.1?}",
        rep.level_c, rep.residual
    ))
}

/// Threshold at σ₀ = 0 equals the closed expression, and grows with σ₀.
fn thresholds() -> Check {
    let mut worst: f64 = 0.0;
    for (n, d, alpha) in [(2, 1.0, 1.0), (2, 0.5, 3.0), (3, 1.0, 2.0), (4, 2.0, 0.7)] {
        let c = cfg(n, d, alpha);
        let m = moser_limit_value(n).map_err(|e| e.to_string())?;
        let expr = (n as f64 / d).powi(n as i32) / (m * alpha.powi(n as i32 - 1));
        let t0 = theorem11_threshold(&c, 0.0).map_err(|e| e.to_string())?;
        let e = rel(t0, expr);
        ensure!(e <= 1e-12, "N={n} d={d} α={alpha}: {t0} vs {expr}");
        worst = worst.max(e);
        let values: Vec<f64> = (0..10)
            .map(|k| theorem11_threshold(&c, 0.3 * k as f64).unwrap())
            .collect();
        ensure!(values.windows(2).all(|w| w[1] > w[0]), "not increasing: {values:?}");
    }
    Ok(format!("max rel err {worst:.1e}, monotone on 10 points for 4 configs"))
}

/// Norm homogeneity, `E(0) = 0`, and `u_M = 0` on everything the library emits.
fn normalization(u_star: Option<&RadialFunction>) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for n in [2, 3, 4] {
        let c = cfg(n, 1.0, 1.0);
        let grid = Arc::new(RadialGrid::graded(&c, 64, 0.97).unwrap());
        for _ in 0..10 {
            let u = random_function(&grid, &mut rng);
            let s: f64 = rng.gen_range(-20.0..20.0);
            let p: f64 = rng.gen_range(1.0..6.0);
            let (a, b) = (grad_norm_n(&u.scaled(s)), s.abs() * grad_norm_n(&u));
            worst = worst.max(rel(a, b));
            let (a2, b2) = (lp_norm(&u.scaled(s), p).unwrap(), s.abs() * lp_norm(&u, p).unwrap());
            worst = worst.max(rel(a2, b2));
        }
        for nl in [Nonlinearity::rational(20.0, 2.0).unwrap(), Nonlinearity::rational(0.3, 1.0).unwrap()] {
            let prim = Primitive::new(&nl, &c).unwrap();
            ensure!(energy(&RadialFunction::zeros(grid.clone()), &prim) == 0.0, "E(0) ≠ 0 for N={n}");
        }
        let mf = MoserFunction::new(&c, 10.0).unwrap();
        let eig = first_eigenpair(&grid, 1e-10, 20_000).map_err(|e| e.to_string())?;
        let w = to_radial_function(&mf, &grid).unwrap();
        let dir = vec![1.0; grid.len()];
        for f in [&w, &eig.eigenfunction, &w.scaled(3.0), &w.axpy(0.5, &dir), &w.lerp(&eig.eigenfunction, 0.3)] {
            ensure!(*f.values().last().unwrap() == 0.0, "boundary value not zero for N={n}");
        }
    }
    ensure!(worst <= 1e-12, "homogeneity rel err {worst:e}");
    let bad = RadialFunction::new(
        Arc::new(RadialGrid::graded(&cfg(2, 1.0, 1.0), 4, 1.0).unwrap()),
        vec![1.0, 1.0, 1.0, 1.0, 1e-12],
    );
    ensure!(bad.is_err(), "nonzero boundary value accepted");
    if let Some(u) = u_star {
        ensure!(*u.values().last().unwrap() == 0.0, "u* boundary value not zero");
    }
    Ok(format!("homogeneity max rel err {worst:.1e}, E(0) = 0, u_M = 0"))
}

fn report(id: u32, name: &str, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let (tag, detail, ok) = match outcome {
        Ok(d) => ("PASS", d, true),
        Err(d) => ("FAIL", d, false),
    };
    println!("criterion {id} {tag}  {name}: {detail} [{:.1?}]", start.elapsed());
    ok
}

fn main() -> ExitCode {
    // Libtest flags such as `--nocapture` or filters are accepted and ignored.
    let mut u_star = None;
    let results = [
        report(1, "Moser moment sweep", moser_sweep),
        report(2, "recurrence consistency", recurrence),
        report(3, "limit constant", limit_constant),
        report(4, "disk eigenvalue", disk_eigenvalue),
        report(5, "gradient fidelity", gradient_fidelity),
        report(6, "end-to-end mountain pass", || end_to_end(&mut u_star)),
        report(7, "threshold identities", thresholds),
        report(8, "homogeneity and normalization", || normalization(u_star.as_ref())),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
