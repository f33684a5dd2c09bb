// Growth probes: a large Gaussian under the focusing `g ≡ −1` and under a defocusing
// oscillating coupling, each until the sup-norm threshold or the resolution limit.

use std::f64::consts::PI;

use nls_homog::coupling::TrigPoly;
use nls_homog::solver::{blowup_probe, growth_probe, GrowthReport, SimConfig};
use nls_homog::spectral::{ComplexField, Grid2D};

fn show(label: &str, r: &GrowthReport) {
    println!(
        "{label:<11} stop {:<16} t = {:<8}  max sup {:.3}  mass drift {:.1e}",
        r.stop.as_str(),
        r.hit_time.map_or("-".into(), |t| format!("{t:.4}")),
        r.max_sup(),
        r.max_mass_drift()
    );
}

pub fn run_example() -> nls_homog::Result<()> {
    let grid = Grid2D::new(256, 8.0 * PI)?;
    let u0 = ComplexField::gaussian(grid, 3.0, 1.0);
    let focusing = SimConfig::homogeneous(grid, 5e-4, 0.5, 10, -1.0)?;
    show("focusing", &growth_probe(&u0, &focusing, 12.0)?);

    let spec = TrigPoly::cosine([1, 0], 1.0).plus_constant(1.0).into();
    let cfg = SimConfig::homogeneous(grid, 5e-4, 0.5, 10, 0.0)?;
    show("defocusing", &blowup_probe(&spec, 1.0, 2, &u0, &cfg, 12.0)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> nls_homog::Result<()> {
    run_example()
}
