// Fourth moments of the alloy resonance and the `n⁻⁴` bound.

use nls_homog::coupling::{AlloyBump, AlloyLaw};
use nls_homog::resonance::{alloy_moment_estimate, decay_fit};
use nls_homog::spectral::Grid2D;

pub fn run_example() -> nls_homog::Result<()> {
    let grid = Grid2D::new(128, 16.0)?;
    let bump = AlloyBump::default();
    println!("bump integral {:.6}, cutoff radius {:.2}", bump.integral(), bump.cutoff());
    let mut pairs = Vec::new();
    for n in [2, 4, 8] {
        let e = alloy_moment_estimate(&bump, &AlloyLaw::Rademacher, 2.0, n, 200, 7, &grid)?;
        println!(
            "n = {n}: {:.3e} ± {:.1e}  exact {:.3e}  bound {:.3e}  within {}",
            e.estimate,
            e.stderr,
            e.exact,
            e.bound,
            e.within_bound()
        );
        pairs.push((n as f64, e.estimate));
    }
    println!("slope {:.3}", decay_fit(&pairs)?.slope);
    Ok(())
}

#[allow(dead_code)]
fn main() -> nls_homog::Result<()> {
    run_example()
}
