// Residual of the product rule for `(-Δ+1)⁻¹(FG)` on band-limited fields.

use std::f64::consts::PI;

use nls_homog::spectral::{helmholtz_product_identity_residual, ComplexField, Grid2D};
use nls_homog::Complex64;

pub fn run_example() -> nls_homog::Result<()> {
    let grid = Grid2D::new(64, 8.0 * PI)?;
    let f = ComplexField::from_fn(grid, |x, y| Complex64::new((x / 2.0).cos() + 0.3 * (x - y).sin(), 0.2 * y.cos()));
    let g = ComplexField::from_fn(grid, |x, y| Complex64::from_polar(1.0, 0.5 * x + y) + (1.5 * y).cos());
    let r = helmholtz_product_identity_residual(&f, &g)?;
    println!("residual {r:.3e}");

    let rough = ComplexField::from_fn(grid, |x, _| Complex64::new((7.0 * x).cos(), 0.0));
    match helmholtz_product_identity_residual(&rough, &g) {
        Err(e) => println!("rejected: {e}"),
        Ok(r) => println!("unexpected residual {r:.3e}"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> nls_homog::Result<()> {
    run_example()
}
