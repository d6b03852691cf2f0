//! Prints the Trudinger–Moser constants, the limit constant and the β
//! threshold for N = 2..5 on the unit ball with α = 1.

use tm_critical::constants::{
    corollary12_threshold, moser_limit_constant, ps_level_bound, theorem11_threshold, ProblemConfig,
};

fn main() -> tm_critical::error::Result<()> {
    println!("{:>2} {:>12} {:>12} {:>10} {:>12} {:>14}", "N", "omega", "alpha_N", "kappa", "ps_bound", "threshold");
    for n in 2..=5 {
        let cfg = ProblemConfig::new(n, 1.0, 1.0)?;
        println!(
            "{n:>2} {:>12.8} {:>12.8} {:>10.5} {:>12.6} {:>14.6}",
            cfg.omega,
            cfg.alpha_n,
            cfg.kappa,
            ps_level_bound(&cfg),
            corollary12_threshold(&cfg)?
        );
    }

    println!();
    for n in 2..=4 {
        let limit = moser_limit_constant(n, 1e-3)?;
        println!(
            "N = {n}: limit constant {:.8} ± {:.1e}, observed decay n^-{:.2}",
            limit.value, limit.error, limit.observed_rate
        );
    }

    let cfg = ProblemConfig::new(2, 1.0, 1.0)?;
    println!();
    for sigma0 in [0.0, 0.5, 1.0, 2.0] {
        println!("sigma0 = {sigma0:3}: beta must exceed {:.6}", theorem11_threshold(&cfg, sigma0)?);
    }
    Ok(())
}
