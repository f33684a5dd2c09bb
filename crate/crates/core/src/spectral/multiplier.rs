use rustfft::num_complex::Complex64;

use super::{lp_bump, Grid2D};
use crate::{Error, Result};

/// Diagonal Fourier multiplier, stored in FFT slot order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDiagonal {
    grid: Grid2D,
    values: Vec<Complex64>,
}

impl SpectralDiagonal {
    /// Samples `symbol(ξ₁, ξ₂)` at every grid wavenumber.
    pub fn from_symbol(grid: Grid2D, mut symbol: impl FnMut(f64, f64) -> Complex64) -> Self {
        let ks = grid.wavenumbers_fft_order();
        let mut values = Vec::with_capacity(grid.len());
        for &k1 in &ks {
            for &k2 in &ks {
                values.push(symbol(k1, k2));
            }
        }
        Self { grid, values }
    }

    pub fn from_real_symbol(grid: Grid2D, mut symbol: impl FnMut(f64, f64) -> f64) -> Self {
        Self::from_symbol(grid, |k1, k2| Complex64::new(symbol(k1, k2), 0.0))
    }

    pub fn constant(grid: Grid2D, value: Complex64) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
        }
    }

    pub fn from_values(grid: Grid2D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::arg("multiplier length does not match grid"));
        }
        Ok(Self { grid, values })
    }

    /// `1/(|ξ|² + 1)`
    pub fn inv_helmholtz(grid: Grid2D) -> Self {
        Self::from_real_symbol(grid, |a, b| 1.0 / (a * a + b * b + 1.0))
    }

    /// `m(|ξ|/N)`
    pub fn lp_low(grid: Grid2D, cutoff: f64) -> Self {
        Self::from_real_symbol(grid, move |a, b| lp_bump(a.hypot(b) / cutoff))
    }

    /// `1 - m(|ξ|/N)`
    pub fn lp_high(grid: Grid2D, cutoff: f64) -> Self {
        Self::from_real_symbol(grid, move |a, b| 1.0 - lp_bump(a.hypot(b) / cutoff))
    }

    /// `e^{-it|ξ|²}`, the symbol of `e^{itΔ}`.
    pub fn free_propagator(grid: Grid2D, t: f64) -> Self {
        Self::from_symbol(grid, move |a, b| Complex64::from_polar(1.0, -t * (a * a + b * b)))
    }

    /// `iξ_axis`, with the unpaired Nyquist mode set to zero so that real fields
    /// keep real derivatives.
    pub fn derivative(grid: Grid2D, axis: usize) -> Self {
        assert!(axis < 2, "axis must be 0 or 1");
        let edge = -grid.nyquist() * (1.0 - 1e-12);
        Self::from_symbol(grid, move |a, b| {
            let xi = if axis == 0 { a } else { b };
            Complex64::new(0.0, if xi <= edge { 0.0 } else { xi })
        })
    }

    /// `-|ξ|²`, the symbol of `Δ`.
    pub fn laplacian(grid: Grid2D) -> Self {
        Self::from_real_symbol(grid, |a, b| -(a * a + b * b))
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Pointwise symbol product `self ⊙ other`.
    pub fn compose(&self, other: &SpectralDiagonal) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub fn sum(&self, other: &SpectralDiagonal) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|z| z.im == 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn propagator_is_unimodular() {
        let g = Grid2D::new(32, 2.0 * PI).unwrap();
        let m = SpectralDiagonal::free_propagator(g, 0.731);
        assert!(m.values().iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
    }

    #[test]
    fn self_adjoint_symbols_are_real() {
        let g = Grid2D::new(32, 2.0 * PI).unwrap();
        assert!(SpectralDiagonal::inv_helmholtz(g).is_real());
        assert!(SpectralDiagonal::lp_low(g, 2.0).is_real());
        assert!(SpectralDiagonal::lp_high(g, 2.0).is_real());
    }

    #[test]
    fn lp_partition_of_unity_is_exact() {
        let g = Grid2D::new(64, 16.0 * PI).unwrap();
        for &n in &[0.5, 1.0, 2.0, 4.0] {
            let s = SpectralDiagonal::lp_low(g, n)
                .sum(&SpectralDiagonal::lp_high(g, n))
                .unwrap();
            assert!(s.values().iter().all(|z| *z == Complex64::new(1.0, 0.0)));
        }
    }
}
