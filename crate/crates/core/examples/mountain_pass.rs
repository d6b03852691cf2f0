//! Path-deformation mountain-pass solve on the unit disk, then a residual
//! and level summary of the located critical point.

use std::sync::Arc;

use tm_critical::constants::ProblemConfig;
use tm_critical::mountain_pass::{mountain_pass_solve, MountainPassParams};
use tm_critical::nonlinearity::{Nonlinearity, Primitive};
use tm_critical::radial::RadialGrid;

fn main() -> tm_critical::error::Result<()> {
    let cfg = ProblemConfig::new(2, 1.0, 1.0)?;
    let grid = Arc::new(RadialGrid::graded(&cfg, 512, 0.97)?);
    let prim = Primitive::new(&Nonlinearity::rational(20.0, 2.0)?, &cfg)?;

    let report = mountain_pass_solve(&prim, &grid, &MountainPassParams::default())?;
    println!("j₀ = {}, ρ = {:.4}, R = {:.4}", report.j0, report.rho, report.r);
    println!("initial path max   {:.10}", report.initial_path_max);
    println!("deformed path max  {:.10}", report.pre_polish_level);
    println!("critical level c   {:.10}  (bound {:.6})", report.level_c, report.level_bound);
    println!("residual           {:.3e}", report.residual);
    println!("admissible         {}", report.admissible);

    let u = report.u_star.values();
    println!("\nu*(0) = {:.6}", u[0]);
    for k in [0, 64, 128, 256, 384, 448, 512] {
        println!("  r = {:.4}  u = {:.6}", grid.nodes()[k], u[k]);
    }
    Ok(())
}
