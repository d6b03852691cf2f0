//! Moser functions: closed-form moments against quadrature, and how the
//! discrete interpolant approaches unit gradient norm as the mesh is refined.

use std::sync::Arc;

use tm_critical::cli::moser_check_rows;
use tm_critical::constants::ProblemConfig;
use tm_critical::moser::{to_radial_function, MoserFunction};
use tm_critical::radial::{grad_norm_n, RadialGrid};

fn main() -> tm_critical::error::Result<()> {
    let rows = moser_check_rows(&[2, 3, 4], &[2.0, 10.0, 100.0], 1.0)?;
    let worst = rows.iter().max_by(|a, b| a.rel_err.total_cmp(&b.rel_err)).unwrap();
    println!(
        "{} checks, worst: N={} j={} m={} {} rel_err {:.2e}",
        rows.len(),
        worst.n,
        worst.j,
        worst.m,
        worst.kind,
        worst.rel_err
    );

    let cfg = ProblemConfig::new(2, 1.0, 1.0)?;
    let mf = MoserFunction::new(&cfg, 50.0)?;
    println!("\nj = 50, plateau {:.6} on r ≤ {:.4}", mf.plateau(), mf.knee());
    for cells in [64, 256, 1024] {
        let grid = Arc::new(RadialGrid::graded_with_knots(&cfg, cells, 0.97, &[mf.knee()])?);
        let u = to_radial_function(&mf, &grid)?;
        println!("M = {cells:5}: discrete ‖ω_j‖ = {:.10}", grad_norm_n(&u));
    }
    Ok(())
}
