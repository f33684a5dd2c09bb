//! Coupling functions `g` and their homogenized constants `ḡ`.
//!
//! A [`CouplingSpec`] is a declarative description serialized as JSON with a `kind` tag:
//!
//! ```json
//! {"kind": "trig_poly", "coeffs": [{"k": [0, 0], "c": [1.0, 0.0]},
//!                                  {"k": [1, 0], "c": [0.5, 0.0]},
//!                                  {"k": [-1, 0], "c": [0.5, 0.0]}]}
//! ```
//!
//! Other kinds are `quasi_periodic` (`coeffs` over `ℤ^d` plus the `d×2` matrix `a`),
//! `periodic_sampled` (`samples`, an `M×M` array on `[0, 2π)²`), `alloy` (`bump`, `law`,
//! `seed`) and `convex` (`terms`, each a `weight` and a nested `spec`).

mod alloy;
mod trig;

use serde::{Deserialize, Serialize};

pub use alloy::{
    sample_alloy, trial_seed, AlloyBump, AlloyLaw, AlloyRealization, AlloySpec, BumpProfile,
    Envelope, LatticeBox, SiteRng, TAIL_TOLERANCE,
};
pub use trig::{PeriodicSampled, QuasiPeriodic, QuasiTerm, TrigPoly, TrigTerm};

use crate::spectral::{ComplexField, Grid2D};
use crate::{Complex64, Error, Result};

const WEIGHT_TOL: f64 = 1e-15;

/// One term `c · e^{iω·x}` with a real frequency vector.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Mode {
    pub omega: [f64; 2],
    pub c: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvexTerm {
    pub weight: f64,
    pub spec: CouplingSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Convex {
    pub terms: Vec<ConvexTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CouplingSpec {
    TrigPoly(TrigPoly),
    QuasiPeriodic(QuasiPeriodic),
    PeriodicSampled(PeriodicSampled),
    Alloy(AlloySpec),
    Convex(Convex),
}

impl From<TrigPoly> for CouplingSpec {
    fn from(g: TrigPoly) -> Self {
        CouplingSpec::TrigPoly(g)
    }
}

impl From<QuasiPeriodic> for CouplingSpec {
    fn from(g: QuasiPeriodic) -> Self {
        CouplingSpec::QuasiPeriodic(g)
    }
}

impl From<PeriodicSampled> for CouplingSpec {
    fn from(g: PeriodicSampled) -> Self {
        CouplingSpec::PeriodicSampled(g)
    }
}

impl From<AlloySpec> for CouplingSpec {
    fn from(g: AlloySpec) -> Self {
        CouplingSpec::Alloy(g)
    }
}

impl CouplingSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            CouplingSpec::TrigPoly(_) => "trig_poly",
            CouplingSpec::QuasiPeriodic(_) => "quasi_periodic",
            CouplingSpec::PeriodicSampled(_) => "periodic_sampled",
            CouplingSpec::Alloy(_) => "alloy",
            CouplingSpec::Convex(_) => "convex",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CouplingSpec::TrigPoly(g) => g.validate(),
            CouplingSpec::QuasiPeriodic(g) => g.validate(),
            CouplingSpec::PeriodicSampled(g) => g.validate(),
            CouplingSpec::Alloy(g) => g.validate(),
            CouplingSpec::Convex(c) => {
                if c.terms.is_empty() {
                    return Err(Error::InvalidSpec("convex combination has no terms".into()));
                }
                let mut total = 0.0;
                for t in &c.terms {
                    if !(t.weight.is_finite() && t.weight >= 0.0) {
                        return Err(Error::InvalidSpec(format!("weight {} is negative", t.weight)));
                    }
                    total += t.weight;
                    t.spec.validate()?;
                }
                if (total - 1.0).abs() > WEIGHT_TOL {
                    return Err(Error::InvalidSpec(format!("weights sum to {total}, not 1")));
                }
                Ok(())
            }
        }
    }

    /// The homogenized constant `ḡ`.
    pub fn mean_value(&self) -> f64 {
        match self {
            CouplingSpec::TrigPoly(g) => g.mean(),
            CouplingSpec::QuasiPeriodic(g) => g.mean(),
            CouplingSpec::PeriodicSampled(g) => g.mean(),
            CouplingSpec::Alloy(g) => g.mean(),
            CouplingSpec::Convex(c) => c.terms.iter().map(|t| t.weight * t.spec.mean_value()).sum(),
        }
    }

    /// Largest per-axis frequency present in `g` (before the `n` scaling).
    pub fn max_frequency(&self) -> f64 {
        match self {
            CouplingSpec::Alloy(g) => g.bump.bandwidth(),
            CouplingSpec::Convex(c) => {
                c.terms.iter().map(|t| t.spec.max_frequency()).fold(0.0, f64::max)
            }
            other => other
                .modes()
                .iter()
                .map(|m| m.omega[0].abs().max(m.omega[1].abs()))
                .fold(0.0, f64::max),
        }
    }

    /// Whether `g` is the same constant everywhere.
    pub fn is_constant(&self) -> bool {
        match self {
            CouplingSpec::Alloy(g) => g.bump.amplitude == 0.0,
            CouplingSpec::Convex(c) => c.terms.iter().all(|t| t.weight == 0.0 || t.spec.is_constant()),
            other => other.modes().iter().all(|m| m.omega == [0.0, 0.0]),
        }
    }

    /// `sup |g|`, exact for sampled specs and bounded via the envelope for alloys.
    pub fn sup_bound(&self) -> f64 {
        match self {
            CouplingSpec::PeriodicSampled(g) => g.modes().iter().map(|m| m.c.norm()).sum::<f64>().max(g.sup()),
            CouplingSpec::Alloy(g) => g.bump.sup_bound() * g.law.sup(),
            CouplingSpec::Convex(c) => c.terms.iter().map(|t| t.weight * t.spec.sup_bound()).sum(),
            other => other.modes().iter().map(|m| m.c.norm()).sum(),
        }
    }

    fn modes(&self) -> Vec<Mode> {
        match self {
            CouplingSpec::TrigPoly(g) => g.modes(),
            CouplingSpec::QuasiPeriodic(g) => g.modes(),
            CouplingSpec::PeriodicSampled(g) => g.modes(),
            _ => Vec::new(),
        }
    }

    /// Samples of `g(n·x)`; see [`evaluate`].
    pub fn evaluate(&self, n: u32, grid: &Grid2D) -> Result<ComplexField> {
        evaluate(self, n, grid)
    }
}

/// Samples of `g(n·x)` on the grid, real-valued.
///
/// The scaled frequencies must sit strictly below the grid Nyquist limit on every axis.
/// A term exactly at the limit is accepted only when it is a real cosine whose nonzero
/// frequency components all equal the limit, since such a term is represented exactly by
/// its grid samples.
pub fn evaluate(spec: &CouplingSpec, n: u32, grid: &Grid2D) -> Result<ComplexField> {
    if n == 0 {
        return Err(Error::arg("n must be a positive integer"));
    }
    spec.validate()?;
    evaluate_valid(spec, n, grid)
}

/// Runs the Nyquist guard of [`evaluate`] without sampling.
pub fn check_resolution(spec: &CouplingSpec, n: u32, grid: &Grid2D) -> Result<()> {
    if n == 0 {
        return Err(Error::arg("n must be a positive integer"));
    }
    match spec {
        CouplingSpec::Alloy(g) => crate::spectral::nyquist_guard(grid, n, g.bump.bandwidth()),
        CouplingSpec::Convex(c) => c.terms.iter().try_for_each(|t| check_resolution(&t.spec, n, grid)),
        other => guard_modes(&other.modes(), n, grid),
    }
}

fn evaluate_valid(spec: &CouplingSpec, n: u32, grid: &Grid2D) -> Result<ComplexField> {
    match spec {
        CouplingSpec::Alloy(g) => {
            crate::spectral::nyquist_guard(grid, n, g.bump.bandwidth())?;
            g.evaluate(n, grid)
        }
        CouplingSpec::Convex(c) => {
            let mut acc = vec![0.0; grid.len()];
            for t in &c.terms {
                let f = evaluate_valid(&t.spec, n, grid)?;
                for (a, v) in acc.iter_mut().zip(f.values()) {
                    *a += t.weight * v.re;
                }
            }
            ComplexField::from_values(*grid, acc.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
        }
        other => {
            let modes = other.modes();
            guard_modes(&modes, n, grid)?;
            Ok(sum_modes(&modes, n, grid))
        }
    }
}

fn guard_modes(modes: &[Mode], n: u32, grid: &Grid2D) -> Result<()> {
    let nyq = grid.nyquist();
    let tol = 1e-12 * nyq;
    let nf = n as f64;
    for m in modes {
        let f = [nf * m.omega[0].abs(), nf * m.omega[1].abs()];
        let top = f[0].max(f[1]);
        if top < nyq - tol {
            continue;
        }
        let on_edge = f.iter().all(|&v| v == 0.0 || (v - nyq).abs() <= tol);
        if top <= nyq + tol && on_edge && m.c.im == 0.0 {
            continue;
        }
        return Err(Error::Nyquist { n, frequency: top, nyquist: nyq });
    }
    Ok(())
}

fn sum_modes(modes: &[Mode], n: u32, grid: &Grid2D) -> ComplexField {
    let size = grid.points_per_axis();
    let x: Vec<f64> = (0..size).map(|i| grid.coordinate(i)).collect();
    let nf = n as f64;
    let mut acc = vec![0.0; grid.len()];
    let mut e1 = vec![Complex64::default(); size];
    let mut e2 = vec![Complex64::default(); size];
    for m in modes {
        for (i, &xi) in x.iter().enumerate() {
            e1[i] = m.c * Complex64::from_polar(1.0, nf * m.omega[0] * xi);
            e2[i] = Complex64::from_polar(1.0, nf * m.omega[1] * xi);
        }
        for (i, a) in e1.iter().enumerate() {
            let row = &mut acc[i * size..(i + 1) * size];
            for (r, b) in row.iter_mut().zip(&e2) {
                *r += a.re * b.re - a.im * b.im;
            }
        }
    }
    ComplexField::from_values_unchecked(*grid, acc.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
}

/// `ḡ` of a spec.
pub fn mean_value(spec: &CouplingSpec) -> f64 {
    spec.mean_value()
}

/// Builds a validated convex combination `Σ wᵢ gᵢ`.
pub fn convex_combine(terms: impl IntoIterator<Item = (f64, CouplingSpec)>) -> Result<CouplingSpec> {
    let spec = CouplingSpec::Convex(Convex {
        terms: terms.into_iter().map(|(weight, spec)| ConvexTerm { weight, spec }).collect(),
    });
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Grid2D {
        Grid2D::new(64, 4.0 * PI).unwrap()
    }

    #[test]
    fn constant_spec_evaluates_to_constant() {
        let f = evaluate(&TrigPoly::constant(1.0).into(), 3, &grid()).unwrap();
        assert!(f.values().iter().all(|v| *v == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn cosine_at_n_two() {
        let g = grid();
        let f = evaluate(&TrigPoly::cosine([1, 0], 1.0).into(), 2, &g).unwrap();
        let want = ComplexField::from_real_fn(g, |x, _| (2.0 * x).cos());
        assert!(f.max_abs_diff(&want).unwrap() < 1e-12);
        assert_eq!(f.max_imag(), 0.0);
    }

    #[test]
    fn phased_trig_poly_mean() {
        let c = Complex64::new(0.5, -0.5);
        let g = TrigPoly::new([([0, 0], Complex64::new(0.7, 0.0)), ([1, 0], c), ([-1, 0], c.conj())]);
        assert_eq!(mean_value(&g.into()), 0.7);
    }

    #[test]
    fn nyquist_guard_is_strict_for_phased_terms() {
        // Nyquist of the grid is 16
        let g = grid();
        let cos: CouplingSpec = TrigPoly::cosine([1, 0], 1.0).into();
        assert!(evaluate(&cos, 15, &g).is_ok());
        assert!(evaluate(&cos, 16, &g).is_ok());
        assert!(matches!(evaluate(&cos, 17, &g), Err(Error::Nyquist { .. })));
        let c = Complex64::new(0.0, 0.5);
        let sin: CouplingSpec = TrigPoly::new([([1, 0], c), ([-1, 0], c.conj())]).into();
        assert!(matches!(evaluate(&sin, 16, &g), Err(Error::Nyquist { .. })));
        let mixed: CouplingSpec = TrigPoly::cosine([2, 1], 1.0).into();
        assert!(matches!(evaluate(&mixed, 8, &g), Err(Error::Nyquist { .. })));
    }

    #[test]
    fn convex_mean_and_evaluation_distribute() {
        let g = grid();
        let a: CouplingSpec = TrigPoly::constant(1.0).into();
        let b: CouplingSpec = TrigPoly::cosine([0, 1], 2.0).into();
        let c = convex_combine([(0.5, a.clone()), (0.5, b.clone())]).unwrap();
        assert_eq!(c.mean_value(), 0.5);
        let fa = evaluate(&a, 3, &g).unwrap();
        let fb = evaluate(&b, 3, &g).unwrap();
        let fc = evaluate(&c, 3, &g).unwrap();
        let avg = fa.scale_real(0.5).add(&fb.scale_real(0.5)).unwrap();
        assert!(fc.max_abs_diff(&avg).unwrap() < 1e-12);
        let single = convex_combine([(1.0, b.clone())]).unwrap();
        assert_eq!(evaluate(&single, 3, &g).unwrap(), fb);
    }

    #[test]
    fn convex_weights_are_checked() {
        let a: CouplingSpec = TrigPoly::constant(1.0).into();
        assert!(convex_combine([(0.5, a.clone()), (0.4, a.clone())]).is_err());
        assert!(convex_combine([(1.5, a.clone()), (-0.5, a.clone())]).is_err());
        assert!(convex_combine([(0.1, a.clone()), (0.2, a.clone()), (0.7, a)]).is_ok());
    }

    #[test]
    fn quasi_periodic_matches_direct_sum() {
        let g = grid();
        let s2 = 2f64.sqrt();
        let q = QuasiPeriodic {
            coeffs: vec![
                QuasiTerm { k: vec![0, 0], c: [1.0, 0.0] },
                QuasiTerm { k: vec![1, -1], c: [0.25, 0.1] },
                QuasiTerm { k: vec![-1, 1], c: [0.25, -0.1] },
            ],
            a: vec![[1.0, 0.0], [s2, 0.5]],
        };
        let f = evaluate(&q.clone().into(), 2, &g).unwrap();
        assert_eq!(q.mean(), 1.0);
        let want = ComplexField::from_real_fn(g, |x1, x2| {
            let phase = 2.0 * ((1.0 - s2) * x1 - 0.5 * x2);
            1.0 + 2.0 * (0.25 * phase.cos() - 0.1 * phase.sin())
        });
        assert!(f.max_abs_diff(&want).unwrap() < 1e-12);
    }

    #[test]
    fn alloy_is_deterministic_and_bounded() {
        let g = Grid2D::new(128, 8.0).unwrap();
        let spec: CouplingSpec =
            AlloySpec { bump: AlloyBump::default(), law: AlloyLaw::Rademacher, seed: 11 }.into();
        let a = evaluate(&spec, 1, &g).unwrap();
        let b = evaluate(&spec, 1, &g).unwrap();
        assert_eq!(a, b);
        assert_eq!(spec.mean_value(), 0.0);
        assert!(a.sup_norm() <= spec.sup_bound());
        assert!(a.sup_norm() > 0.5);
    }

    #[test]
    fn alloy_guard_uses_bump_bandwidth() {
        let g = Grid2D::new(64, 4.0 * PI).unwrap();
        let spec: CouplingSpec =
            AlloySpec { bump: AlloyBump::default(), law: AlloyLaw::Rademacher, seed: 1 }.into();
        assert!(matches!(evaluate(&spec, 1, &g), Err(Error::Nyquist { .. })));
    }

    #[test]
    fn json_round_trip() {
        let spec = convex_combine([
            (0.25, TrigPoly::cosine([1, 1], 1.0).plus_constant(1.0).into()),
            (0.75, AlloySpec { bump: AlloyBump::default(), law: AlloyLaw::Uniform { low: 0.0, high: 1.0 }, seed: 3 }.into()),
        ])
        .unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        let back: CouplingSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
        let typo = r#"{"kind": "trig_poly", "coefs": []}"#;
        assert!(serde_json::from_str::<CouplingSpec>(typo).is_err());
    }
}
