// The Duhamel functional for `g(n·) − ḡ` along the homogenized solution.

use std::f64::consts::PI;

use nls_homog::coupling::{CouplingSpec, TrigPoly};
use nls_homog::norms::duhamel_report;
use nls_homog::solver::{evolve, SimConfig};
use nls_homog::spectral::{ComplexField, Grid2D};

pub fn run_example() -> nls_homog::Result<()> {
    let grid = Grid2D::new(128, 16.0 * PI)?;
    let spec: CouplingSpec = TrigPoly::cosine([1, 0], 1.0).plus_cosine([0, 1], 0.5).plus_constant(2.0).into();
    let u = evolve(&ComplexField::gaussian(grid, 1.0, 1.0), &SimConfig::homogeneous(grid, 2e-3, 0.5, 5, spec.mean_value())?)?;
    println!("   n   value        coarse       change");
    for n in [1, 2, 4, 8] {
        let r = duhamel_report(&spec, n, &u)?;
        println!(
            "{n:>4}   {:.4e}   {:.4e}   {:.2}%",
            r.value,
            r.coarse.unwrap_or(f64::NAN),
            100.0 * r.relative_change().unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> nls_homog::Result<()> {
    run_example()
}
