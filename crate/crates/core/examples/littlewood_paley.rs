// Littlewood-Paley projections: partition of unity, Bernstein ratios and off-support decay.

use std::f64::consts::PI;

use nls_homog::spectral::{
    bernstein_ratio, decay_samples, lp_decay_check, lp_project_high, lp_project_low, ComplexField, Grid2D,
};

pub fn run_example() -> nls_homog::Result<()> {
    let grid = Grid2D::new(256, 16.0 * PI)?;
    let bump = ComplexField::from_real_fn(grid, |x1, x2| {
        let r2 = x1 * x1 + x2 * x2;
        if r2 < 1.0 {
            (1.0 - 1.0 / (1.0 - r2)).exp()
        } else {
            0.0
        }
    });
    let samples = decay_samples(&grid, 1.0);
    println!("   N   |P<=N f + P>N f - f|   Bernstein(2,4)   decay(c=5, p=4)");
    for n in [2.0, 4.0, 8.0] {
        let split = lp_project_low(&bump, n)?.add(&lp_project_high(&bump, n)?)?.max_abs_diff(&bump)?;
        let b = bernstein_ratio(&bump, n, 2.0, 4.0)?;
        let d = lp_decay_check(&bump, 1.0, n, 4.0, 5.0, &samples)?;
        println!("{n:>4}   {split:>20.2e}   {b:>14.4}   {d:>15.4e}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> nls_homog::Result<()> {
    run_example()
}
