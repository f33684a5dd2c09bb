//! The non-resonance quantity `h_n = (-Δ+1)⁻¹(g(n·) − ḡ)`, its gradient, power-law
//! fits in `n`, and Monte-Carlo fourth moments for alloy couplings.

mod moments;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use moments::{alloy_moment_estimate, moment_kernel, MomentEstimate, MomentKernel, MIN_TRIALS};

use crate::coupling::{evaluate, CouplingSpec};
use crate::spectral::{gradient_magnitude, inv_helmholtz, ComplexField, Grid2D};
use crate::{Complex64, Error, Result};

/// `(-Δ+1)⁻¹(g(n·) − c)` for a chosen constant `c`.
pub fn resolvent_field(spec: &CouplingSpec, n: u32, grid: &Grid2D, subtract: f64) -> Result<ComplexField> {
    let g = evaluate(spec, n, grid)?;
    let centred = g.map(|z| z - Complex64::new(subtract, 0.0));
    Ok(inv_helmholtz(&centred).real_part())
}

/// Maxima of `|h_n|` and `|∇h_n|` over the grid nodes with `|x| ≤ R`.
pub fn resonance_sup_norm(spec: &CouplingSpec, n: u32, radius: f64, grid: &Grid2D) -> Result<(f64, f64)> {
    if !(radius > 0.0 && radius <= 0.5 * grid.side_length()) {
        return Err(Error::arg(format!(
            "ball radius {radius} must lie in (0, L/2 = {}]",
            0.5 * grid.side_length()
        )));
    }
    let h = resolvent_field(spec, n, grid, spec.mean_value())?;
    let grad = gradient_magnitude(&h);
    Ok((h.ball_sup(radius), grad.ball_sup(radius)))
}

/// `max_n (sup|h_n| + sup|∇h_n|) / sup|g(n·)|` over the whole torus, with
/// `h_n = (-Δ+1)⁻¹ g(n·)` (no mean subtracted).
pub fn uniform_bound_check(spec: &CouplingSpec, n_list: &[u32], grid: &Grid2D) -> Result<f64> {
    uniform_bound_ratios(spec, n_list, grid, false).map(|r| r.into_iter().fold(0.0, f64::max))
}

/// Per-`n` ratios of [`uniform_bound_check`]; `centred` subtracts `ḡ` first.
pub fn uniform_bound_ratios(spec: &CouplingSpec, n_list: &[u32], grid: &Grid2D, centred: bool) -> Result<Vec<f64>> {
    if n_list.is_empty() {
        return Err(Error::arg("n list is empty"));
    }
    let shift = if centred { spec.mean_value() } else { 0.0 };
    n_list
        .iter()
        .map(|&n| {
            let g = evaluate(spec, n, grid)?;
            let denom = g.sup_norm();
            if denom == 0.0 {
                return Ok(0.0);
            }
            let h = inv_helmholtz(&g.map(|z| z - Complex64::new(shift, 0.0))).real_part();
            Ok((h.sup_norm() + gradient_magnitude(&h).sup_norm()) / denom)
        })
        .collect()
}

/// Least-squares line through `(log n, log value)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    /// RMS of the log-space fit errors.
    pub residual: f64,
}

pub fn decay_fit(pairs: &[(f64, f64)]) -> Result<DecayFit> {
    if pairs.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 points, got {}", pairs.len())));
    }
    if let Some(&(n, v)) = pairs.iter().find(|(n, v)| !(*v > 0.0) || !(*n > 0.0)) {
        return Err(Error::Fit(format!("nonpositive point (n = {n}, value = {v}); log-log fit undefined")));
    }
    let pts: Vec<(f64, f64)> = pairs.iter().map(|&(n, v)| (n.ln(), v.ln())).collect();
    let m = pts.len() as f64;
    let xb = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let yb = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - xb).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all n values coincide".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - xb) * (p.1 - yb)).sum();
    let slope = sxy / sxx;
    let intercept = yb - slope * xb;
    let residual = (pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / m).sqrt();
    Ok(DecayFit { slope, intercept, residual })
}

/// [`decay_fit`] with the preasymptotic point `n = 1` dropped.
pub fn decay_fit_asymptotic(pairs: &[(f64, f64)]) -> Result<DecayFit> {
    let kept: Vec<(f64, f64)> = pairs.iter().copied().filter(|&(n, _)| n != 1.0).collect();
    decay_fit(&kept)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceEntry {
    pub n: u32,
    pub sup: f64,
    pub grad_sup: f64,
    /// Sup of `|h_n|` over the whole torus.
    pub global_sup: f64,
    pub global_grad_sup: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub spec_id: String,
    pub ball_radius: f64,
    pub entries: Vec<ResonanceEntry>,
    /// Fit of `sup` against `n`, excluding `n = 1`; absent when it cannot be formed.
    pub fit: Option<DecayFit>,
    pub fit_error: Option<String>,
}

impl ResonanceReport {
    pub fn build(spec_id: &str, spec: &CouplingSpec, n_values: &[u32], radius: f64, grid: &Grid2D) -> Result<Self> {
        let mut ns = n_values.to_vec();
        ns.sort_unstable();
        ns.dedup();
        if ns.len() != n_values.len() {
            return Err(Error::arg("n values must be distinct"));
        }
        if ns.is_empty() {
            return Err(Error::arg("n list is empty"));
        }
        if !(radius > 0.0 && radius <= 0.5 * grid.side_length()) {
            return Err(Error::arg(format!("ball radius {radius} out of range")));
        }
        let gbar = spec.mean_value();
        let mut entries = Vec::with_capacity(ns.len());
        for &n in &ns {
            let h = resolvent_field(spec, n, grid, gbar)?;
            let grad = gradient_magnitude(&h);
            entries.push(ResonanceEntry {
                n,
                sup: h.ball_sup(radius),
                grad_sup: grad.ball_sup(radius),
                global_sup: h.sup_norm(),
                global_grad_sup: grad.sup_norm(),
            });
        }
        let pairs: Vec<(f64, f64)> = entries.iter().map(|e| (e.n as f64, e.sup)).collect();
        let (fit, fit_error) = match decay_fit_asymptotic(&pairs) {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e.to_string())),
        };
        Ok(Self { spec_id: spec_id.to_owned(), ball_radius: radius, entries, fit, fit_error })
    }

    /// Columns `n, sup, grad_sup`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["n", "sup", "grad_sup"])?;
        for e in &self.entries {
            out.write_record([e.n.to_string(), format!("{:.17e}", e.sup), format!("{:.17e}", e.grad_sup)])?;
        }
        out.flush().map_err(|e| Error::io("<csv>", e))
    }
}
