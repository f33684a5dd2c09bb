//! Discrete spacetime norms over trajectories and the Duhamel error functional.
//!
//! Spatial integrals are Riemann sums with weight `h²`; temporal integrals use the
//! trapezoidal rule over the stored instants. An infinite exponent means the max.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coupling::{evaluate, CouplingSpec};
use crate::solver::Trajectory;
use crate::spectral::{multiply_in_place, ComplexField, Fft2, SpectralDiagonal};
use crate::{Complex64, Error, Result};

/// Schrödinger-admissible exponents in two dimensions: `1/q + 1/r = 1/2`, `(q, r) ≠ (2, ∞)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdmissiblePair {
    q: f64,
    r: f64,
}

impl AdmissiblePair {
    pub fn new(q: f64, r: f64) -> Result<Self> {
        let in_range = |p: f64| p >= 2.0 && !p.is_nan();
        if !(in_range(q) && in_range(r)) {
            return Err(Error::arg(format!("exponents must lie in [2, ∞], got ({q}, {r})")));
        }
        if ((1.0 / q + 1.0 / r) - 0.5).abs() > 1e-12 {
            return Err(Error::arg(format!("(q, r) = ({q}, {r}) violates 1/q + 1/r = 1/2")));
        }
        if q == 2.0 && r.is_infinite() {
            return Err(Error::arg("the endpoint (2, ∞) is not admissible in two dimensions"));
        }
        Ok(Self { q, r })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn label(&self) -> String {
        let f = |p: f64| if p.is_infinite() { "inf".to_string() } else { format!("{p}") };
        format!("({},{})", f(self.q), f(self.r))
    }

    /// `(∞,2), (8,8/3), (6,3), (4,4), (3,6), (8/3,8)`.
    pub fn standard_set() -> [AdmissiblePair; 6] {
        [
            (f64::INFINITY, 2.0),
            (8.0, 8.0 / 3.0),
            (6.0, 3.0),
            (4.0, 4.0),
            (3.0, 6.0),
            (8.0 / 3.0, 8.0),
        ]
        .map(|(q, r)| AdmissiblePair::new(q, r).expect("standard pairs are admissible"))
    }
}

/// `‖f‖_{L^r}^r` for finite `r`, or `‖f‖_∞` for `r = ∞`.
fn spatial_power(f: &ComplexField, r: f64) -> f64 {
    if r.is_infinite() {
        return f.sup_norm();
    }
    let w = f.grid().cell_area();
    if r == 4.0 {
        return f.values().iter().map(|z| z.norm_sqr().powi(2)).sum::<f64>() * w;
    }
    if r == 2.0 {
        return f.values().iter().map(|z| z.norm_sqr()).sum::<f64>() * w;
    }
    f.values().iter().map(|z| z.norm().powf(r)).sum::<f64>() * w
}

/// Trapezoid `(∫ a(t)^q dt)^{1/q}` from instantaneous spatial norms `a_m`.
pub fn temporal_norm(spatial: &[f64], spacing: f64, q: f64) -> Result<f64> {
    if spatial.is_empty() {
        return Err(Error::arg("no instants"));
    }
    if q.is_infinite() {
        return Ok(spatial.iter().copied().fold(0.0, f64::max));
    }
    if spatial.len() < 2 {
        return Err(Error::arg("time quadrature needs at least two instants"));
    }
    Ok(trapezoid(spatial.iter().map(|a| a.powf(q)), spatial.len(), spacing).powf(1.0 / q))
}

fn trapezoid(values: impl Iterator<Item = f64>, len: usize, spacing: f64) -> f64 {
    let mut s = 0.0;
    for (m, v) in values.enumerate() {
        let w = if m == 0 || m + 1 == len { 0.5 } else { 1.0 };
        s += w * v;
    }
    s * spacing
}

/// `‖u‖_{L^q_t L^r_x}`; finite `q` needs at least two instants.
pub fn mixed_norm(traj: &Trajectory, pair: AdmissiblePair) -> Result<f64> {
    mixed_norm_unchecked(traj, pair.q, pair.r)
}

/// `‖u‖_{L^q_t L^r_x}` for any exponents in `[1, ∞]`.
pub fn mixed_norm_unchecked(traj: &Trajectory, q: f64, r: f64) -> Result<f64> {
    if !(q >= 1.0 && r >= 1.0) {
        return Err(Error::arg(format!("exponents must be at least 1, got ({q}, {r})")));
    }
    let spatial: Vec<f64> = traj
        .fields()
        .iter()
        .map(|f| {
            let p = spatial_power(f, r);
            if r.is_infinite() {
                p
            } else {
                p.powf(1.0 / r)
            }
        })
        .collect();
    temporal_norm(&spatial, traj.spacing(), q)
}

/// `‖u‖_{L⁴_{t,x}}`.
pub fn l4_spacetime(traj: &Trajectory) -> Result<f64> {
    if traj.len() < 2 {
        return Err(Error::arg("time quadrature needs at least two instants"));
    }
    let p: Vec<f64> = traj.fields().iter().map(|f| spatial_power(f, 4.0)).collect();
    Ok(trapezoid(p.into_iter(), traj.len(), traj.spacing()).powf(0.25))
}

/// Max of [`mixed_norm`] over [`AdmissiblePair::standard_set`].
pub fn strichartz_norm(traj: &Trajectory) -> Result<f64> {
    let mut best = 0.0_f64;
    for pair in AdmissiblePair::standard_set() {
        best = best.max(mixed_norm(traj, pair)?);
    }
    Ok(best)
}

/// `‖a − b‖_{L⁴_{t,x}}` for identically sampled trajectories.
pub fn spacetime_l4_diff(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    a.same_sampling(b)?;
    if a.len() < 2 {
        return Err(Error::arg("time quadrature needs at least two instants"));
    }
    let w = a.grid().cell_area();
    let p = a.fields().iter().zip(b.fields()).map(|(x, y)| {
        x.values().iter().zip(y.values()).map(|(u, v)| (u - v).norm_sqr().powi(2)).sum::<f64>() * w
    });
    Ok(trapezoid(p, a.len(), a.spacing()).powf(0.25))
}

/// Streaming `‖a − b‖_{L⁴_{t,x}}` where `b` arrives one instant at a time.
#[derive(Debug)]
pub struct L4DiffAccumulator<'a> {
    reference: &'a Trajectory,
    sum: f64,
    seen: usize,
}

impl<'a> L4DiffAccumulator<'a> {
    pub fn new(reference: &'a Trajectory) -> Self {
        Self { reference, sum: 0.0, seen: 0 }
    }

    /// Adds instant `m` of the other trajectory; instants must arrive in order.
    pub fn push(&mut self, m: usize, field: &ComplexField) -> Result<()> {
        if m != self.seen || m >= self.reference.len() {
            return Err(Error::SamplingMismatch(format!("unexpected instant {m}")));
        }
        let r = &self.reference.fields()[m];
        if r.grid() != field.grid() {
            return Err(Error::SamplingMismatch("different grids".into()));
        }
        let p = r.values().iter().zip(field.values()).map(|(u, v)| (u - v).norm_sqr().powi(2)).sum::<f64>()
            * r.grid().cell_area();
        let w = if m == 0 || m + 1 == self.reference.len() { 0.5 } else { 1.0 };
        self.sum += w * p;
        self.seen += 1;
        Ok(())
    }

    pub fn finish(self) -> Result<f64> {
        if self.seen != self.reference.len() || self.seen < 2 {
            return Err(Error::SamplingMismatch(format!(
                "received {} of {} instants",
                self.seen,
                self.reference.len()
            )));
        }
        Ok((self.sum * self.reference.spacing()).powf(0.25))
    }
}

/// Spacetime norms of one trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub l4_spacetime: f64,
    /// Keyed by [`AdmissiblePair::label`].
    pub mixed: BTreeMap<String, f64>,
    pub strichartz: f64,
    pub mass_initial: f64,
    pub mass_final: f64,
}

pub fn norm_report(traj: &Trajectory) -> Result<NormReport> {
    let mut mixed = BTreeMap::new();
    let mut strichartz = 0.0_f64;
    for pair in AdmissiblePair::standard_set() {
        let v = mixed_norm(traj, pair)?;
        strichartz = strichartz.max(v);
        mixed.insert(pair.label(), v);
    }
    Ok(NormReport {
        l4_spacetime: l4_spacetime(traj)?,
        mixed,
        strichartz,
        mass_initial: traj.initial().mass(),
        mass_final: traj.last().mass(),
    })
}

/// Value of the Duhamel functional and its stored-resolution self-check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DuhamelReport {
    pub value: f64,
    /// The same functional from every other stored instant, when the count allows.
    pub coarse: Option<f64>,
}

impl DuhamelReport {
    /// `|coarse − value| / value`; halving the resolution should move it by < 5%.
    pub fn relative_change(&self) -> Option<f64> {
        let c = self.coarse?;
        if self.value == 0.0 {
            return Some(if c == 0.0 { 0.0 } else { f64::INFINITY });
        }
        Some((c - self.value).abs() / self.value)
    }
}

/// `‖w‖_{L⁴_{t,x}}` for `w(t) = ∫₀ᵗ e^{i(t−s)Δ}[(g(n·) − ḡ)|u|²u(s)] ds`.
///
/// `u_traj` must come from a run with the constant coupling `ḡ`.
pub fn duhamel_error(spec: &CouplingSpec, n: u32, u_traj: &Trajectory) -> Result<f64> {
    Ok(duhamel_report(spec, n, u_traj)?.value)
}

pub fn duhamel_report(spec: &CouplingSpec, n: u32, u_traj: &Trajectory) -> Result<DuhamelReport> {
    let gbar = spec.mean_value();
    match u_traj.provenance().coupling_constant {
        Some(c) if (c - gbar).abs() <= 1e-12 * gbar.abs().max(1.0) => {}
        Some(c) => {
            return Err(Error::Provenance(format!("trajectory was run with ḡ = {c}, spec has ḡ = {gbar}")))
        }
        None => return Err(Error::Provenance("trajectory was not run with a constant coupling".into())),
    }
    let g = evaluate(spec, n, u_traj.grid())?;
    let deviation: Vec<f64> = g.values().iter().map(|z| z.re - gbar).collect();
    duhamel_with_deviation(&deviation, u_traj)
}

/// Duhamel functional for explicit deviation samples `g − ḡ` on the trajectory grid.
pub fn duhamel_with_deviation(deviation: &[f64], u_traj: &Trajectory) -> Result<DuhamelReport> {
    let grid = *u_traj.grid();
    if deviation.len() != grid.len() {
        return Err(Error::GridMismatch);
    }
    let len = u_traj.len();
    if len < 2 {
        return Err(Error::arg("time quadrature needs at least two instants"));
    }
    let tau = u_traj.spacing();
    let fine = duhamel_pass(deviation, u_traj, 1, tau)?;
    let coarse = if (len - 1) % 2 == 0 && len >= 3 {
        Some(duhamel_pass(deviation, u_traj, 2, 2.0 * tau)?)
    } else {
        None
    };
    Ok(DuhamelReport { value: fine, coarse })
}

fn duhamel_pass(deviation: &[f64], u_traj: &Trajectory, stride: usize, tau: f64) -> Result<f64> {
    let grid = *u_traj.grid();
    let mut fft = Fft2::new(grid.points_per_axis());
    let prop = SpectralDiagonal::free_propagator(grid, tau);
    let norm = 1.0 / grid.len() as f64;
    let integrand = |u: &ComplexField| -> Vec<Complex64> {
        u.values().iter().zip(deviation).map(|(z, d)| z * (z.norm_sqr() * d)).collect()
    };
    let instants: Vec<&ComplexField> = u_traj.fields().iter().step_by(stride).collect();
    let count = instants.len();
    let w4 = |w: &[Complex64]| w.iter().map(|z| z.norm_sqr().powi(2)).sum::<f64>() * grid.cell_area();
    let mut w = vec![Complex64::default(); grid.len()];
    let mut f_prev = integrand(instants[0]);
    let mut sum = 0.0;
    for (m, u) in instants.iter().enumerate().skip(1) {
        let f_next = integrand(u);
        for (wi, fi) in w.iter_mut().zip(&f_prev) {
            *wi += fi * (0.5 * tau);
        }
        multiply_in_place(&mut fft, &mut w, prop.values(), norm);
        for (wi, fi) in w.iter_mut().zip(&f_next) {
            *wi += fi * (0.5 * tau);
        }
        if w.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { step: m, time: m as f64 * tau });
        }
        let weight = if m + 1 == count { 0.5 } else { 1.0 };
        sum += weight * w4(&w);
        f_prev = f_next;
    }
    Ok((sum * tau).powf(0.25))
}
