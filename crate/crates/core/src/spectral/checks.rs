//! Numerical probes of the harmonic-analysis facts the homogenization
//! argument rests on: the resolvent product identity, Bernstein ratios and
//! off-support decay of low-frequency projections.

use rustfft::num_complex::Complex64;

use super::{forward_transform, gradient, inv_helmholtz, laplacian, lp_project_low, ComplexField};
use crate::{Error, Result};

/// Coefficients smaller than this fraction of the peak count as absent.
const BANDWIDTH_TOL: f64 = 1e-13;

/// Errors unless `n · frequency` lies strictly below the grid Nyquist limit `πN_g/L`.
pub fn nyquist_guard(grid: &super::Grid2D, n: u32, frequency: f64) -> Result<()> {
    let nyquist = grid.nyquist();
    let scaled = n as f64 * frequency;
    if !(scaled < nyquist) {
        return Err(Error::Nyquist { n, frequency: scaled, nyquist });
    }
    Ok(())
}

fn check_alias_free(f: &ComplexField) -> Result<()> {
    let limit = 0.5 * f.grid().nyquist();
    let bandwidth = forward_transform(f).bandwidth(BANDWIDTH_TOL);
    if bandwidth >= limit {
        return Err(Error::Bandwidth { bandwidth, limit });
    }
    Ok(())
}

/// Sup-norm of
///
/// ```text
///     (-Δ+1)⁻¹(FG) - [F·(-Δ+1)⁻¹G + (-Δ+1)⁻¹(ΔF·(-Δ+1)⁻¹G) + 2(-Δ+1)⁻¹(∇F·∇(-Δ+1)⁻¹G)]
/// ```
///
/// Both inputs must be band-limited below half the Nyquist frequency so
/// every pointwise product is alias-free.
pub fn helmholtz_product_identity_residual(f: &ComplexField, g: &ComplexField) -> Result<f64> {
    f.same_grid(g)?;
    check_alias_free(f)?;
    check_alias_free(g)?;

    let lhs = inv_helmholtz(&f.mul(g)?);
    let h = inv_helmholtz(g);
    let (f1, f2) = gradient(f);
    let (h1, h2) = gradient(&h);
    let dot = f1.mul(&h1)?.add(&f2.mul(&h2)?)?;

    let rhs = f
        .mul(&h)?
        .add(&inv_helmholtz(&laplacian(f).mul(&h)?))?
        .axpy(Complex64::new(2.0, 0.0), &inv_helmholtz(&dot))?;
    lhs.max_abs_diff(&rhs)
}

fn check_exponent(p: f64, name: &str) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::arg(format!("{name} must be >= 1, got {p}")))
    }
}

/// `‖P_{≤N} f‖_q / (N^{2/p - 2/q} ‖f‖_p)`; zero for the zero field.
pub fn bernstein_ratio(f: &ComplexField, cutoff: f64, p: f64, q: f64) -> Result<f64> {
    check_exponent(p, "p")?;
    check_exponent(q, "q")?;
    if p > q {
        return Err(Error::arg(format!("Bernstein ratio needs p <= q, got p = {p}, q = {q}")));
    }
    let denom_norm = f.lp_norm(p);
    if denom_norm == 0.0 {
        return Ok(0.0);
    }
    let projected = lp_project_low(f, cutoff)?;
    let exponent = 2.0 / p - 2.0 / q;
    Ok(projected.lp_norm(q) / (cutoff.powf(exponent) * denom_norm))
}

/// Largest value over `samples` of
///
/// ```text
///     |P_{≤N} f(x)| · ((|x| - R)·N)^c / (N^{2/p} ‖f‖_p)
/// ```
///
/// for `f` supported in `|x| <= R`. Samples must satisfy `|x| > 2R` and
/// stay `R` away from the torus edge (`|x| <= L/2 - R`).
pub fn lp_decay_check(
    f: &ComplexField,
    support_radius: f64,
    cutoff: f64,
    p: f64,
    c: f64,
    samples: &[(usize, usize)],
) -> Result<f64> {
    if !(support_radius > 0.0 && cutoff * support_radius > 1.0) {
        return Err(Error::arg(format!(
            "decay check needs N·R > 1, got N = {cutoff}, R = {support_radius}"
        )));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::arg(format!("decay check needs 1 < p < ∞, got {p}")));
    }
    let grid = *f.grid();
    let n = grid.points_per_axis();
    let outer = 0.5 * grid.side_length() - support_radius;
    for &(i, j) in samples {
        if i >= n || j >= n {
            return Err(Error::arg(format!("sample ({i}, {j}) is off the grid")));
        }
        let r = grid.coordinate(i).hypot(grid.coordinate(j));
        if r <= 2.0 * support_radius || r > outer {
            return Err(Error::arg(format!(
                "sample at |x| = {r:.4} violates 2R < |x| <= L/2 - R"
            )));
        }
    }
    let norm = f.lp_norm(p);
    if norm == 0.0 {
        return Ok(0.0);
    }
    let projected = lp_project_low(f, cutoff)?;
    let scale = cutoff.powf(2.0 / p) * norm;
    let best = samples
        .iter()
        .map(|&(i, j)| {
            let r = grid.coordinate(i).hypot(grid.coordinate(j));
            projected.get(i, j).norm() * ((r - support_radius) * cutoff).powf(c)
        })
        .fold(0.0, f64::max);
    Ok(best / scale)
}

/// Default sample set for [`lp_decay_check`]: every admissible node.
pub fn decay_samples(grid: &super::Grid2D, support_radius: f64) -> Vec<(usize, usize)> {
    grid.annulus_nodes(
        2.0 * support_radius,
        0.5 * grid.side_length() - support_radius,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid2D;
    use std::f64::consts::PI;

    #[test]
    fn identity_trivial_cases() {
        let g = Grid2D::new(64, 2.0 * PI).unwrap();
        let f = ComplexField::from_real_fn(g, |x1, x2| (x1 + 2.0 * x2).cos());
        let zero = ComplexField::zeros(g);
        assert_eq!(helmholtz_product_identity_residual(&f, &zero).unwrap(), 0.0);
        let c = ComplexField::constant(g, Complex64::new(1.7, -0.2));
        assert!(helmholtz_product_identity_residual(&c, &f).unwrap() <= 1e-12);
    }

    #[test]
    fn identity_rejects_aliasing_inputs() {
        let g = Grid2D::new(32, 2.0 * PI).unwrap();
        let f = ComplexField::from_real_fn(g, |x1, _| (9.0 * x1).cos());
        let h = ComplexField::from_real_fn(g, |_, x2| x2.cos());
        assert!(helmholtz_product_identity_residual(&f, &h).is_err());
    }

    #[test]
    fn bernstein_trivial_cases() {
        let g = Grid2D::new(128, 16.0 * PI).unwrap();
        let wave = ComplexField::plane_wave(g, 1.0, 0.5);
        assert!((bernstein_ratio(&wave, 2.0, 2.0, 2.0).unwrap() - 1.0).abs() < 1e-12);
        let high = ComplexField::plane_wave(g, 4.0, 1.0);
        assert!(bernstein_ratio(&high, 2.0, 2.0, 4.0).unwrap() < 1e-13);
        assert!(bernstein_ratio(&high, 2.0, 4.0, 2.0).is_err());
        assert!(bernstein_ratio(&high, 2.0, 0.5, 2.0).is_err());
    }

    #[test]
    fn decay_check_guards() {
        let g = Grid2D::new(64, 16.0 * PI).unwrap();
        let f = ComplexField::zeros(g);
        let samples = decay_samples(&g, 1.0);
        assert_eq!(lp_decay_check(&f, 1.0, 2.0, 4.0, 5.0, &samples).unwrap(), 0.0);
        assert!(lp_decay_check(&f, 1.0, 0.5, 4.0, 5.0, &samples).is_err());
        let origin = g.node_near(0.0, 0.0).unwrap();
        assert!(lp_decay_check(&f, 1.0, 2.0, 4.0, 5.0, &[origin]).is_err());
        let edge = g.node_near(-0.5 * g.side_length(), 0.0).unwrap();
        assert!(lp_decay_check(&f, 1.0, 2.0, 4.0, 5.0, &[edge]).is_err());
    }
}
