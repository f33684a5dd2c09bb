// Coupling families, their means and their JSON form.

use nls_homog::coupling::{convex_combine, AlloyBump, AlloyLaw, AlloySpec, CouplingSpec, QuasiPeriodic, QuasiTerm, TrigPoly};
use nls_homog::spectral::Grid2D;

pub fn run_example() -> nls_homog::Result<()> {
    let periodic: CouplingSpec = TrigPoly::cosine([1, 0], 1.0).plus_constant(1.0).into();
    let quasi: CouplingSpec = QuasiPeriodic {
        coeffs: vec![
            QuasiTerm { k: vec![0, 0], c: [1.0, 0.0] },
            QuasiTerm { k: vec![1, -1], c: [0.25, 0.0] },
            QuasiTerm { k: vec![-1, 1], c: [0.25, 0.0] },
        ],
        a: vec![[1.0, 0.0], [2f64.sqrt(), 0.0]],
    }
    .into();
    let alloy: CouplingSpec =
        AlloySpec { bump: AlloyBump::default(), law: AlloyLaw::Uniform { low: 0.5, high: 1.5 }, seed: 3 }.into();
    let mix = convex_combine([(0.5, periodic.clone()), (0.3, quasi.clone()), (0.2, alloy.clone())])?;

    let grid = Grid2D::new(512, 8.0 * std::f64::consts::PI)?;
    for (name, spec) in [("periodic", &periodic), ("quasi", &quasi), ("alloy", &alloy), ("convex", &mix)] {
        let g = spec.evaluate(1, &grid)?;
        let avg = g.values().iter().map(|z| z.re).sum::<f64>() / grid.len() as f64;
        println!("{name:<9} gbar {:.6}  grid average {avg:.6}  sup bound {:.3}", spec.mean_value(), spec.sup_bound());
    }
    println!("{}", serde_json::to_string(&periodic)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> nls_homog::Result<()> {
    run_example()
}
