// Covariance of the equation under `v ↦ n^{1−α/2} v(n²t, nx)` with `g ↦ n^α g(n·)`.

use std::f64::consts::PI;

use nls_homog::coupling::{evaluate, CouplingSpec, TrigPoly};
use nls_homog::solver::{evolve, scaling_symmetry_check, scaling_symmetry_check_with_dt, SimConfig};
use nls_homog::spectral::{ComplexField, Grid2D};

pub fn run_example() -> nls_homog::Result<()> {
    let grid = Grid2D::new(128, 16.0 * PI)?;
    let spec: CouplingSpec = TrigPoly::cosine([1, 0], 1.0).plus_constant(1.0).into();
    let g = evaluate(&spec, 1, &grid)?;
    let v = evolve(&ComplexField::gaussian(grid, 1.0, 1.0), &SimConfig::new(grid, 1e-3, 0.2, 200, &g)?)?;
    for (n, alpha) in [(2, 0.0), (2, 1.0), (2, 2.0)] {
        let same_steps = scaling_symmetry_check(&v, n, alpha, &spec)?;
        let coarser = scaling_symmetry_check_with_dt(&v, n, alpha, &spec, 1e-3)?;
        println!("n = {n}, alpha = {alpha}: defect {same_steps:.2e}, with an unscaled step {coarser:.2e}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> nls_homog::Result<()> {
    run_example()
}
