// Spacetime norms of a trajectory over the standard admissible pairs.

use std::f64::consts::PI;

use nls_homog::norms::norm_report;
use nls_homog::solver::{evolve, SimConfig};
use nls_homog::spectral::{ComplexField, Grid2D};

pub fn run_example() -> nls_homog::Result<()> {
    let grid = Grid2D::new(128, 16.0 * PI)?;
    let traj = evolve(&ComplexField::gaussian(grid, 1.0, 1.0), &SimConfig::homogeneous(grid, 1e-2, 1.0, 2, 1.0)?)?;
    let report = norm_report(&traj)?;
    for (pair, v) in &report.mixed {
        println!("L^q_t L^r_x {pair:<12} {v:.6}");
    }
    println!("L4 spacetime {:.6}, Strichartz {:.6}", report.l4_spacetime, report.strichartz);
    println!("mass {:.12} -> {:.12}", report.mass_initial, report.mass_final);
    Ok(())
}

#[allow(dead_code)]
fn main() -> nls_homog::Result<()> {
    run_example()
}
