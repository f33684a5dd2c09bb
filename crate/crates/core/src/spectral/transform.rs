use rustfft::num_complex::Complex64;

use super::{ComplexField, Fft2, Grid2D, SpectralDiagonal};
use crate::{Error, Result};

/// Fourier coefficients `c_k` with `f(x) = Σ_k c_k e^{iξ_k·x}`, FFT slot order.
///
/// An on-grid plane wave therefore has a single unit coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: Grid2D,
    values: Vec<Complex64>,
}

impl Spectrum {
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Coefficient of the signed wavenumber index `(k₁, k₂)`.
    pub fn coefficient(&self, k1: i64, k2: i64) -> Option<Complex64> {
        let s1 = self.grid.slot_of(k1)?;
        let s2 = self.grid.slot_of(k2)?;
        Some(self.values[self.grid.flat(s1, s2)])
    }

    /// Largest per-axis `|ξ|` among coefficients above `rel_tol·max|c|`.
    pub fn bandwidth(&self, rel_tol: f64) -> f64 {
        let peak = self.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let n = self.grid.points_per_axis();
        let mut bw = 0.0f64;
        for s1 in 0..n {
            for s2 in 0..n {
                if self.values[s1 * n + s2].norm() > rel_tol * peak {
                    let k = self
                        .grid
                        .wavenumber(s1)
                        .abs()
                        .max(self.grid.wavenumber(s2).abs());
                    bw = bw.max(k);
                }
            }
        }
        bw
    }

    /// `Σ |c_k|²`
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// `(-1)^{i+j}` accounts for the grid origin sitting at index `N/2`.
fn apply_origin_phase(values: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in 0..n {
            if (i + j) % 2 == 1 {
                values[i * n + j] = -values[i * n + j];
            }
        }
    }
}

pub fn forward_transform(f: &ComplexField) -> Spectrum {
    let grid = *f.grid();
    let n = grid.points_per_axis();
    let mut values = f.values().to_vec();
    Fft2::new(n).forward(&mut values);
    apply_origin_phase(&mut values, n);
    let norm = 1.0 / grid.len() as f64;
    values.iter_mut().for_each(|z| *z *= norm);
    Spectrum { grid, values }
}

pub fn inverse_transform(s: &Spectrum) -> ComplexField {
    let grid = s.grid;
    let n = grid.points_per_axis();
    let mut values = s.values.clone();
    apply_origin_phase(&mut values, n);
    Fft2::new(n).inverse(&mut values);
    ComplexField::from_values_unchecked(grid, values)
}

/// Builds a spectrum from explicit coefficients (FFT slot order).
pub fn spectrum_from_values(grid: Grid2D, values: Vec<Complex64>) -> Result<Spectrum> {
    if values.len() != grid.len() {
        return Err(Error::arg("spectrum length does not match grid"));
    }
    Ok(Spectrum { grid, values })
}

/// `invT(M ⊙ T(f))`
pub fn apply_multiplier(f: &ComplexField, m: &SpectralDiagonal) -> Result<ComplexField> {
    if f.grid() != m.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(apply_multiplier_with(&mut Fft2::new(f.grid().points_per_axis()), f, m))
}

pub(crate) fn apply_multiplier_with(
    fft: &mut Fft2,
    f: &ComplexField,
    m: &SpectralDiagonal,
) -> ComplexField {
    let grid = *f.grid();
    let mut values = f.values().to_vec();
    multiply_in_place(fft, &mut values, m.values(), 1.0 / grid.len() as f64);
    ComplexField::from_values_unchecked(grid, values)
}

/// Applies a multiplier to a raw physical-space buffer in place.
pub(crate) fn multiply_in_place(
    fft: &mut Fft2,
    values: &mut [Complex64],
    symbol: &[Complex64],
    norm: f64,
) {
    fft.forward(values);
    for (z, m) in values.iter_mut().zip(symbol) {
        *z *= m * norm;
    }
    fft.inverse(values);
}

/// `(-Δ + 1)⁻¹ f`
pub fn inv_helmholtz(f: &ComplexField) -> ComplexField {
    let m = SpectralDiagonal::inv_helmholtz(*f.grid());
    apply_multiplier(f, &m).expect("multiplier built on the field's grid")
}

pub fn laplacian(f: &ComplexField) -> ComplexField {
    let m = SpectralDiagonal::laplacian(*f.grid());
    apply_multiplier(f, &m).expect("multiplier built on the field's grid")
}

/// Spectral gradient `(∂₁f, ∂₂f)`.
pub fn gradient(f: &ComplexField) -> (ComplexField, ComplexField) {
    let grid = *f.grid();
    let mut fft = Fft2::new(grid.points_per_axis());
    let d1 = apply_multiplier_with(&mut fft, f, &SpectralDiagonal::derivative(grid, 0));
    let d2 = apply_multiplier_with(&mut fft, f, &SpectralDiagonal::derivative(grid, 1));
    (d1, d2)
}

/// Pointwise `|∇f|`.
pub fn gradient_magnitude(f: &ComplexField) -> ComplexField {
    let (d1, d2) = gradient(f);
    let values = d1
        .values()
        .iter()
        .zip(d2.values())
        .map(|(a, b)| Complex64::new((a.norm_sqr() + b.norm_sqr()).sqrt(), 0.0))
        .collect();
    ComplexField::from_values_unchecked(*f.grid(), values)
}

fn check_cutoff(cutoff: f64) -> Result<()> {
    if cutoff.is_finite() && cutoff > 0.0 {
        Ok(())
    } else {
        Err(Error::arg(format!("Littlewood-Paley cutoff must be positive, got {cutoff}")))
    }
}

/// `P_{≤N} f`
pub fn lp_project_low(f: &ComplexField, cutoff: f64) -> Result<ComplexField> {
    check_cutoff(cutoff)?;
    apply_multiplier(f, &SpectralDiagonal::lp_low(*f.grid(), cutoff))
}

/// `P_{>N} f`
pub fn lp_project_high(f: &ComplexField, cutoff: f64) -> Result<ComplexField> {
    check_cutoff(cutoff)?;
    apply_multiplier(f, &SpectralDiagonal::lp_high(*f.grid(), cutoff))
}

/// `e^{itΔ} f`
pub fn free_propagator(f: &ComplexField, t: f64) -> ComplexField {
    if t == 0.0 {
        return f.clone();
    }
    apply_multiplier(f, &SpectralDiagonal::free_propagator(*f.grid(), t))
        .expect("multiplier built on the field's grid")
}
