//! Spectral toolkit for the homogenization of the 2D inhomogeneous
//! mass-critical cubic NLS
//!
//! ```text
//!     i ∂t uₙ + Δuₙ = g(n x) |uₙ|² uₙ      on a large periodic square,
//! ```
//!
//! compared against the homogenized equation with the constant coupling ḡ.
//!
//! * [`spectral`]: grid, FFTs, Fourier multipliers, Littlewood-Paley
//!   projections and harmonic-analysis property checks.
//! * [`coupling`]: coupling-function families g and their means ḡ.
//! * [`resonance`]: the non-resonance quantity `(-Δ+1)⁻¹(g(n·) - ḡ)`, its
//!   gradient, decay fits and alloy Monte-Carlo fourth moments.
//! * [`solver`]: Strang split-step integration, scaling covariance and the
//!   blow-up probe.
//! * [`norms`]: spacetime Lebesgue norms, Strichartz norm and the Duhamel
//!   error functional.
//! * [`harness`]: sweeps, reports, persistence and the CLI.
//!
//! Run `cargo run --release --example <name>` for one demo per capability.

pub mod coupling;
pub mod error;
pub mod harness;
pub mod norms;
pub mod resonance;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use rustfft::num_complex::Complex64;
