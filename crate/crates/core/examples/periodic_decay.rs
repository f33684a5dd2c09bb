// Decay of the resonance for a coupling given by torus samples.

use std::f64::consts::PI;

use nls_homog::coupling::{CouplingSpec, PeriodicSampled};
use nls_homog::resonance::ResonanceReport;
use nls_homog::spectral::Grid2D;

pub fn run_example() -> nls_homog::Result<()> {
    // 8x8 samples of a positive periodic function, one CSV row per x1 sample
    let mut csv = String::new();
    for i in 0..8 {
        let row: Vec<String> = (0..8)
            .map(|j| {
                let (x, y) = (PI * i as f64 / 4.0, PI * j as f64 / 4.0);
                format!("{}", 2.0 + x.cos() * y.sin() + 0.4 * (2.0 * x).cos() + 0.3 * (x - y).sin())
            })
            .collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    let sampled = PeriodicSampled::from_csv_str(&csv)?;
    println!("mean {:.6}, {} nonzero modes", sampled.mean(), sampled.nonzero_modes());
    let spec: CouplingSpec = sampled.into();
    let grid = Grid2D::new(256, 4.0 * PI)?;
    let report = ResonanceReport::build("sampled", &spec, &[2, 4, 8, 16], PI, &grid)?;
    report.write_csv(std::io::stdout())?;
    let fit = report.fit.expect("four points");
    println!("slope {:.3}, intercept {:.3}", fit.slope, fit.intercept);
    Ok(())
}

#[allow(dead_code)]
fn main() -> nls_homog::Result<()> {
    run_example()
}
