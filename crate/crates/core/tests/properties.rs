mod common;

use std::sync::Arc;

use proptest::prelude::*;

use tm_critical::constants::*;
use tm_critical::moser::*;
use tm_critical::mountain_pass::check_ps_admissible;
use tm_critical::nonlinearity::*;
use tm_critical::radial::*;

fn grid(n: u32, cells: usize) -> Arc<RadialGrid> {
    Arc::new(RadialGrid::graded(&ProblemConfig::new(n, 1.0, 1.0).unwrap(), cells, 0.97).unwrap())
}

fn radial(n: u32, cells: usize, coeffs: &[f64]) -> RadialFunction {
    let c = coeffs.to_vec();
    RadialFunction::from_fn(grid(n, cells), move |r| {
        c.iter().enumerate().map(|(k, a)| a * r.powi(k as i32)).sum::<f64>() * (1.0 - r)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norms_are_homogeneous(
        n in 2u32..=4,
        coeffs in prop::collection::vec(-2.0f64..2.0, 1..5),
        s in prop_oneof![-50.0f64..-1e-3, 1e-3f64..50.0],
        p in 1.0f64..6.0,
    ) {
        let u = radial(n, 40, &coeffs);
        let su = u.scaled(s);
        let g = grad_norm_n(&u);
        prop_assert!((grad_norm_n(&su) - s.abs() * g).abs() <= 1e-12 * s.abs() * g.max(1e-300));
        let l = lp_norm(&u, p).unwrap();
        prop_assert!((lp_norm(&su, p).unwrap() - s.abs() * l).abs() <= 1e-12 * s.abs() * l.max(1e-300));
    }

    #[test]
    fn boundary_value_survives_operations(
        coeffs in prop::collection::vec(-2.0f64..2.0, 1..5),
        s in -10.0f64..10.0,
        theta in 0.0f64..1.0,
    ) {
        let u = radial(2, 30, &coeffs);
        let v = radial(2, 30, &[1.0, -0.5]);
        let dir: Vec<f64> = (0..u.grid().len()).map(|i| (i as f64).sin()).collect();
        for w in [u.scaled(s), u.axpy(s, &dir), u.lerp(&v, theta), u.difference(&v)] {
            prop_assert_eq!(*w.values().last().unwrap(), 0.0);
        }
        let mut bad = u.values().to_vec();
        *bad.last_mut().unwrap() = 1e-9;
        prop_assert!(RadialFunction::new(u.grid().clone(), bad).is_err());
    }

    #[test]
    fn energy_vanishes_at_zero(beta0 in 0.01f64..100.0, p in 1.0f64..4.0, n in 2u32..=4) {
        let cfg = ProblemConfig::new(n, 1.0, 1.0).unwrap();
        let prim = Primitive::new(&Nonlinearity::rational(beta0, p).unwrap(), &cfg).unwrap();
        prop_assert_eq!(energy(&RadialFunction::zeros(grid(n, 16)), &prim), 0.0);
    }

    #[test]
    fn recurrence_matches_closed_form(j in 2.0f64..1e4, n in 2u32..=6, m_frac in 0.0f64..1.0) {
        let m = 1 + ((n - 1) as f64 * m_frac).round() as u32;
        let r = recurrence_i(j, n, m).unwrap();
        prop_assert!((r.recurrence - r.closed_form).abs() <= 1e-11 * r.closed_form);
    }

    #[test]
    fn moser_moments_match_oracle(j in 2.0f64..300.0, n in 2u32..=4, d in 0.2f64..3.0) {
        let mf = MoserFunction::new(&ProblemConfig::new(n, d, 1.0).unwrap(), j).unwrap();
        for m in 1..=n {
            let a = moser_moment_closed(&mf, m).unwrap();
            let o = common::moser_moment(n, d, j, m);
            prop_assert!((a - o).abs() <= 1e-9 * o, "m = {}: {} vs {}", m, a, o);
        }
    }

    #[test]
    fn threshold_increases_with_sigma0(
        n in 2u32..=4,
        d in 0.2f64..3.0,
        alpha in 0.1f64..10.0,
        s in 0.0f64..5.0,
        ds in 1e-3f64..5.0,
    ) {
        let cfg = ProblemConfig::new(n, d, alpha).unwrap();
        let m = n as f64;
        let a = theorem11_threshold_with(&cfg, s, m).unwrap();
        let b = theorem11_threshold_with(&cfg, s + ds, m).unwrap();
        prop_assert!(b > a);
        prop_assert!(theorem11_threshold_with(&cfg, -ds, m).is_err());
    }

    #[test]
    fn derived_constants(n in 2u32..=8, d in 0.1f64..10.0, alpha in 0.05f64..50.0) {
        let c = ProblemConfig::new(n, d, alpha).unwrap();
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        prop_assert!((c.kappa * fact * (d / n as f64).powi(n as i32) - 1.0).abs() < 1e-12);
        prop_assert!((c.alpha * c.t0.powf(c.n_prime) / c.alpha_n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn admissibility_matches_definition(c in -1.0f64..10.0, alpha in 0.5f64..20.0) {
        let cfg = ProblemConfig::new(2, 1.0, alpha).unwrap();
        let bound = ps_level_bound(&cfg);
        prop_assert_eq!(check_ps_admissible(c, &cfg), c > 0.0 && c < bound);
    }

    #[test]
    fn primitive_symmetry_and_derivative(beta0 in 0.1f64..50.0, p in 1.0f64..4.0, t in 0.05f64..3.0) {
        let cfg = ProblemConfig::new(2, 1.0, 1.0).unwrap();
        let nl = Nonlinearity::rational(beta0, p).unwrap();
        let prim = Primitive::new(&nl, &cfg).unwrap();
        let g = prim.g(t);
        prop_assert!((prim.g(-t) - g).abs() <= 1e-12 * g.abs().max(1e-300));
        prop_assert!((prim.f(-t) + prim.f(t)).abs() <= 1e-12 * prim.f(t).abs());
        let eps = 1e-4;
        let fd = (prim.g(t + eps) - prim.g(t - eps)) / (2.0 * eps);
        prop_assert!((fd - prim.f(t)).abs() <= 1e-6 * prim.f(t).abs().max(1.0));
    }

    #[test]
    fn energy_gradient_matches_differences(
        n in 2u32..=3,
        coeffs in prop::collection::vec(-1.0f64..1.0, 1..4),
    ) {
        let cfg = ProblemConfig::new(n, 1.0, 1.0).unwrap();
        let prim = Primitive::new(&Nonlinearity::rational(20.0, 2.0).unwrap(), &cfg).unwrap();
        let u = radial(n, 24, &coeffs);
        let g = energy_gradient(&u, &prim);
        let gmax = g.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let e = |x: &[f64]| energy(&RadialFunction::new(u.grid().clone(), x.to_vec()).unwrap(), &prim);
        for i in 0..u.grid().len() - 1 {
            let fd = common::central_difference(&e, u.values(), i, 1e-5);
            prop_assert!((fd - g[i]).abs() <= 1e-6 * gmax.max(1e-3), "i = {}: {} vs {}", i, fd, g[i]);
        }
    }
}
