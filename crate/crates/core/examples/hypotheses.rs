//! Sampled checks of the growth hypotheses for a few nonlinearities.

use std::sync::Arc;

use tm_critical::constants::ProblemConfig;
use tm_critical::eigen::first_eigenpair;
use tm_critical::nonlinearity::{check_hypotheses_thm11, Nonlinearity, SampleGrid};
use tm_critical::radial::RadialGrid;

fn main() -> tm_critical::error::Result<()> {
    let cfg = ProblemConfig::new(2, 1.0, 1.0)?;
    let grid = Arc::new(RadialGrid::graded(&cfg, 512, 0.97)?);
    let lambda1 = first_eigenpair(&grid, 1e-10, 20_000)?.lambda1;
    println!("λ₁ = {lambda1:.6}\n");

    let knots: Vec<f64> = (0..=80).map(|i| 0.125 * i as f64).collect();
    let dip = Nonlinearity::tabulate(|t| if t < 1.0 { -0.5 * t } else { 30.0 * (t - 1.0) / (1.0 + t * t) }, knots)?;
    let cases = [
        ("rational β₀ = 20, p = 2", Nonlinearity::rational(20.0, 2.0)?),
        ("rational β₀ = 20, p = 1", Nonlinearity::rational(20.0, 1.0)?),
        ("rational β₀ = 0.2, p = 2", Nonlinearity::rational(0.2, 2.0)?),
        ("tabulated with a dip", dip),
    ];
    for (name, nl) in &cases {
        let r = check_hypotheses_thm11(nl, &cfg, lambda1, &SampleGrid::default())?;
        println!("{name}");
        println!("  β ≈ {:.4}, σ₀ = {:.4}, threshold {:.4}", r.beta_est, r.sigma0_max, r.threshold.unwrap());
        match r.sigma1_delta {
            Some((s1, delta)) => println!("  near zero: σ₁ = {s1:.4} on |t| ≤ {delta:.4}"),
            None => println!("  near zero: no certificate below λ₁"),
        }
        println!("  satisfied: {}\n", r.satisfied);
    }
    Ok(())
}
