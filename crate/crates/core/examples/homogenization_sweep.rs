// `‖uₙ − u‖_{L⁴}` against the homogenized run for `g = 1 + cos(x₁)`.

use std::f64::consts::PI;

use nls_homog::coupling::TrigPoly;
use nls_homog::harness::{run_homogenization_sweep, SimTemplate, SweepConfig};
use nls_homog::spectral::Grid2D;

pub fn run_example() -> nls_homog::Result<()> {
    let grid = Grid2D::new(128, 16.0 * PI)?;
    let sim = SimTemplate { grid, dt: 2e-3, horizon: 0.5, store_every: 10, dealias: false };
    let cfg = SweepConfig::new(TrigPoly::cosine([1, 0], 1.0).plus_constant(1.0).into(), vec![1, 2, 4, 8], sim);
    let result = run_homogenization_sweep(&cfg)?;
    println!("homogenized: mass {:.6}, L4 {:.6}", result.homogenized.mass, result.homogenized.l4_spacetime);
    result.write_csv(std::io::stdout())?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> nls_homog::Result<()> {
    run_example()
}
