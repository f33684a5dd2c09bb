//! Periodic grid, Fourier transforms, multipliers and Littlewood-Paley
//! machinery.

mod bump;
mod checks;
mod fft;
mod field;
mod grid;
pub mod io;
mod multiplier;
mod transform;

pub use bump::lp_bump;
pub use checks::{
    bernstein_ratio, decay_samples, helmholtz_product_identity_residual, lp_decay_check,
    nyquist_guard,
};
pub use fft::Fft2;
pub use field::ComplexField;
pub use grid::Grid2D;
pub use multiplier::SpectralDiagonal;
pub(crate) use transform::multiply_in_place;
pub use transform::{
    apply_multiplier, forward_transform, free_propagator, gradient, gradient_magnitude,
    inv_helmholtz, inverse_transform, laplacian, lp_project_high, lp_project_low,
    spectrum_from_values, Spectrum,
};
