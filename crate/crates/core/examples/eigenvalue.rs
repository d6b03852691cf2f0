//! First eigenvalue of the N-Laplacian on a ball, with a mesh-refinement
//! table for the disk, where λ₁ = j₀,₁² ≈ 5.7831859630.

use std::sync::Arc;

use tm_critical::constants::ProblemConfig;
use tm_critical::eigen::first_eigenpair;
use tm_critical::radial::RadialGrid;

fn main() -> tm_critical::error::Result<()> {
    let exact = 5.783_185_962_946_784;
    let cfg = ProblemConfig::new(2, 1.0, 1.0)?;
    for cells in [128, 256, 512, 1024] {
        let grid = Arc::new(RadialGrid::graded(&cfg, cells, 0.97)?);
        let res = first_eigenpair(&grid, 1e-10, 20_000)?;
        println!(
            "N = 2, M = {cells:5}: λ₁ = {:.8}  rel err {:.2e}  ({} iterations)",
            res.lambda1,
            (res.lambda1 - exact).abs() / exact,
            res.iterations
        );
    }
    for n in 3..=4 {
        let cfg = ProblemConfig::new(n, 1.0, 1.0)?;
        let grid = Arc::new(RadialGrid::graded(&cfg, 512, 0.97)?);
        let res = first_eigenpair(&grid, 1e-10, 50_000)?;
        println!("N = {n}, M =   512: λ₁ = {:.6}", res.lambda1);
    }
    Ok(())
}
