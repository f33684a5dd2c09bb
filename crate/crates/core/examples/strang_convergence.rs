// Second-order convergence and exact mass conservation of the split-step solver.

use std::f64::consts::PI;

use nls_homog::coupling::{evaluate, TrigPoly};
use nls_homog::solver::{evolve_final, SimConfig};
use nls_homog::spectral::{ComplexField, Grid2D};

pub fn run_example() -> nls_homog::Result<()> {
    let grid = Grid2D::new(128, 16.0 * PI)?;
    let g = evaluate(&TrigPoly::cosine([1, 0], 1.0).plus_constant(1.0).into(), 2, &grid)?;
    let u0 = ComplexField::gaussian(grid, 1.0, 1.0);
    let horizon = 0.5;
    let runs = [0.05, 0.025, 0.0125, 0.00625]
        .iter()
        .map(|&dt| {
            let steps = (horizon / dt as f64).round() as usize;
            evolve_final(&u0, &SimConfig::new(grid, dt, horizon, steps, &g)?)
        })
        .collect::<nls_homog::Result<Vec<_>>>()?;
    for w in runs.windows(3) {
        let ratio = w[0].sub(&w[1])?.l2_norm() / w[1].sub(&w[2])?.l2_norm();
        println!("ratio {ratio:.4}");
    }
    let drift = (runs[3].mass() - u0.mass()).abs() / u0.mass();
    println!("mass drift at dt = 0.00625: {drift:.2e}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> nls_homog::Result<()> {
    run_example()
}
