// Resonance sup-norm of `cos(k·x)` against the closed form `1/(n²|k|²+1)`.

use std::f64::consts::PI;

use nls_homog::coupling::TrigPoly;
use nls_homog::resonance::ResonanceReport;
use nls_homog::spectral::Grid2D;

pub fn run_example() -> nls_homog::Result<()> {
    let grid = Grid2D::new(128, 8.0 * PI)?;
    for k in [[1, 0], [1, 1]] {
        let spec = TrigPoly::cosine(k, 1.0).into();
        let report = ResonanceReport::build("cos", &spec, &[1, 2, 4, 8], 2.0 * PI, &grid)?;
        let k2 = (k[0] * k[0] + k[1] * k[1]) as f64;
        println!("k = {k:?}");
        for e in &report.entries {
            let n = e.n as f64;
            println!("  n = {:>2}  sup = {:.12}  exact = {:.12}", e.n, e.sup, 1.0 / (n * n * k2 + 1.0));
        }
        if let Some(fit) = report.fit {
            println!("  slope {:.3}", fit.slope);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> nls_homog::Result<()> {
    run_example()
}
