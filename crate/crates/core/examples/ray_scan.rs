//! Energy along Moser rays `t ↦ E(t ω_j)` and the search for `j₀`.

use std::sync::Arc;

use tm_critical::constants::ProblemConfig;
use tm_critical::mountain_pass::{find_j0, find_r, scan_moser_ray, verify_ring};
use tm_critical::nonlinearity::{Nonlinearity, Primitive};
use tm_critical::radial::RadialGrid;

fn main() -> tm_critical::error::Result<()> {
    let cfg = ProblemConfig::new(2, 1.0, 1.0)?;
    let grid = Arc::new(RadialGrid::graded(&cfg, 256, 0.97)?);
    let prim = Primitive::new(&Nonlinearity::rational(20.0, 2.0)?, &cfg)?;

    for j in [2, 10, 100] {
        let scan = scan_moser_ray(j, &prim, &grid, 2.0 * cfg.t0, 200)?;
        println!(
            "j = {j:3}: sup E = {:.6} at t = {:.4}, negative by t = {:.2}",
            scan.sup, scan.argmax, scan.t_max
        );
    }

    let search = find_j0(&prim, &grid, (2, 1000))?;
    println!("\nlevel bound {:.6}, j₀ = {:?}", search.level_bound, search.j0);

    let j0 = search.j0.expect("j₀ exists for this nonlinearity");
    for rho in [0.1, 0.3, 0.6] {
        let ring = verify_ring(&prim, &grid, rho, 32, 7)?;
        println!("ρ = {rho}: min sampled E on the ring = {:.3e}", ring.min_energy);
    }
    println!("R = {:.4}", find_r(j0, &prim, &grid, 0.3)?);
    Ok(())
}
