use rustfft::num_complex::Complex64;

use super::Grid2D;
use crate::{Error, Result};

/// Complex samples on a [`Grid2D`], row-major in physical space.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid2D,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn zeros(grid: Grid2D) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn constant(grid: Grid2D, value: Complex64) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
        }
    }

    pub fn from_values(grid: Grid2D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::arg(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::arg("field samples must be finite"));
        }
        Ok(Self { grid, values })
    }

    /// Used internally where finiteness is already guaranteed.
    pub(crate) fn from_values_unchecked(grid: Grid2D, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    /// Samples `f(x₁, x₂)` at every node.
    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let n = grid.points_per_axis();
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..n {
            let x1 = grid.coordinate(i);
            for j in 0..n {
                values.push(f(x1, grid.coordinate(j)));
            }
        }
        Self { grid, values }
    }

    pub fn from_real_fn(grid: Grid2D, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        Self::from_fn(grid, |x1, x2| Complex64::new(f(x1, x2), 0.0))
    }

    /// Plane wave `e^{i(k₁x₁ + k₂x₂)}`.
    pub fn plane_wave(grid: Grid2D, k1: f64, k2: f64) -> Self {
        Self::from_fn(grid, |x1, x2| Complex64::from_polar(1.0, k1 * x1 + k2 * x2))
    }

    /// `A·exp(-|x|²/(2w²))`.
    pub fn gaussian(grid: Grid2D, amplitude: f64, width: f64) -> Self {
        let s = 2.0 * width * width;
        Self::from_real_fn(grid, |x1, x2| amplitude * (-(x1 * x1 + x2 * x2) / s).exp())
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[self.grid.flat(i, j)]
    }

    pub fn same_grid(&self, other: &ComplexField) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn map(&self, mut f: impl FnMut(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&z| f(z)).collect(),
        }
    }

    fn zip_with(
        &self,
        other: &ComplexField,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        self.same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &ComplexField) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ComplexField) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &ComplexField) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|z| z * c)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.map(|z| z * c)
    }

    /// `self + c·other`
    pub fn axpy(&self, c: Complex64, other: &ComplexField) -> Result<Self> {
        self.zip_with(other, |a, b| a + c * b)
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    /// `|f|² f`, the cubic nonlinearity.
    pub fn cubic(&self) -> Self {
        self.map(|z| z * z.norm_sqr())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Discrete `Lᵖ` norm with Riemann weight `h²`; `p = ∞` gives the grid max.
    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_norm_of(self.values.iter().map(|z| z.norm()), p, self.grid.cell_area())
    }

    pub fn l2_norm(&self) -> f64 {
        self.lp_norm(2.0)
    }

    /// `∫|f|²`
    pub fn mass(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_area()
    }

    pub fn max_abs_diff(&self, other: &ComplexField) -> Result<f64> {
        self.same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn max_real(&self) -> f64 {
        self.values.iter().map(|z| z.re.abs()).fold(0.0, f64::max)
    }

    /// Drops imaginary parts.
    pub fn real_part(&self) -> Self {
        self.map(|z| Complex64::new(z.re, 0.0))
    }

    /// Returns the common value when every sample equals it exactly.
    pub fn uniform_value(&self) -> Option<Complex64> {
        let first = *self.values.first()?;
        self.values.iter().all(|&z| z == first).then_some(first)
    }

    /// Maximum of `|f|` over nodes with `|x| <= radius`.
    pub fn ball_sup(&self, radius: f64) -> f64 {
        let n = self.grid.points_per_axis();
        let mut best = 0.0f64;
        for i in 0..n {
            let x1 = self.grid.coordinate(i);
            for j in 0..n {
                let x2 = self.grid.coordinate(j);
                if x1.hypot(x2) <= radius {
                    best = best.max(self.values[i * n + j].norm());
                }
            }
        }
        best
    }

    /// Cyclic shift by whole grid cells.
    pub fn shifted(&self, di: isize, dj: isize) -> Self {
        let n = self.grid.points_per_axis() as isize;
        let mut values = vec![Complex64::new(0.0, 0.0); self.values.len()];
        for i in 0..n {
            let si = (i + di).rem_euclid(n);
            for j in 0..n {
                let sj = (j + dj).rem_euclid(n);
                values[(si * n + sj) as usize] = self.values[(i * n + j) as usize];
            }
        }
        Self {
            grid: self.grid,
            values,
        }
    }
}

/// Discrete `Lᵖ` norm of a sequence of magnitudes.
pub(crate) fn lp_norm_of(mags: impl Iterator<Item = f64>, p: f64, weight: f64) -> f64 {
    if p.is_infinite() {
        return mags.fold(0.0, f64::max);
    }
    if p == 2.0 {
        return (mags.map(|m| m * m).sum::<f64>() * weight).sqrt();
    }
    (mags.map(|m| m.powf(p)).sum::<f64>() * weight).powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_norms_are_closed_form() {
        let g = Grid2D::new(32, 4.0).unwrap();
        let f = ComplexField::constant(g, Complex64::new(2.0, 0.0));
        assert!((f.l2_norm() - 2.0 * 4.0).abs() < 1e-12);
        assert!((f.lp_norm(4.0) - 2.0 * 4.0f64.sqrt()).abs() < 1e-12);
        assert_eq!(f.lp_norm(f64::INFINITY), 2.0);
        assert!((f.mass() - 64.0).abs() < 1e-12);
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let a = ComplexField::zeros(Grid2D::new(16, 1.0).unwrap());
        let b = ComplexField::zeros(Grid2D::new(16, 2.0).unwrap());
        assert!(matches!(a.add(&b), Err(Error::GridMismatch)));
    }

    #[test]
    fn from_values_rejects_nan() {
        let g = Grid2D::new(8, 1.0).unwrap();
        let mut v = vec![Complex64::new(0.0, 0.0); 64];
        v[3] = Complex64::new(f64::NAN, 0.0);
        assert!(ComplexField::from_values(g, v).is_err());
    }

    #[test]
    fn shift_moves_samples() {
        let g = Grid2D::new(8, 2.0 * PI).unwrap();
        let f = ComplexField::from_fn(g, |x1, x2| Complex64::new(x1, x2));
        let s = f.shifted(1, 0);
        assert_eq!(s.get(1, 0), f.get(0, 0));
        assert_eq!(s.get(0, 0), f.get(7, 0));
    }
}
