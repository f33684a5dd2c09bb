use std::io::Write;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use super::{evolve_final, evolve_with, SimConfig, Trajectory};
use crate::coupling::{evaluate, CouplingSpec};
use crate::spectral::{forward_transform, ComplexField};
use crate::{Error, Result};

/// Spectral-energy fraction above half the Nyquist frequency that ends a probe.
pub const TAIL_LIMIT: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Horizon,
    Threshold,
    ResolutionLimit,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::Horizon => "horizon",
            StopReason::Threshold => "threshold",
            StopReason::ResolutionLimit => "resolution-limit",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRecord {
    pub t: f64,
    pub sup: f64,
    /// `‖∇u‖_{L²}`
    pub kinetic: f64,
    /// `‖u‖²_{L²}`
    pub mass: f64,
    /// Fraction of spectral energy with `|ξ|` above half the Nyquist frequency.
    pub tail: f64,
}

/// Diagnostics recorded at every stored instant of a growth probe.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub records: Vec<GrowthRecord>,
    pub stop: StopReason,
    /// Time of the record that ended the run; `None` when the horizon was reached. This
    /// is a finite-resolution surrogate, not a blow-up time.
    pub hit_time: Option<f64>,
}

impl GrowthReport {
    pub fn max_mass_drift(&self) -> f64 {
        let m0 = self.records[0].mass;
        self.records.iter().map(|r| ((r.mass - m0) / m0).abs()).fold(0.0, f64::max)
    }

    pub fn max_sup(&self) -> f64 {
        self.records.iter().map(|r| r.sup).fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["t", "sup", "kinetic", "mass", "tail"])?;
        for r in &self.records {
            out.write_record([r.t, r.sup, r.kinetic, r.mass, r.tail].map(|v| format!("{v:.17e}")))?;
        }
        out.flush().map_err(|e| Error::io("<csv>", e))
    }
}

fn record(t: f64, u: &ComplexField) -> GrowthRecord {
    let grid = u.grid();
    let s = forward_transform(u);
    let ks = grid.wavenumbers_fft_order();
    let cut = 0.5 * grid.nyquist();
    let n = grid.points_per_axis();
    let (mut total, mut high, mut grad) = (0.0, 0.0, 0.0);
    for (a, &k1) in ks.iter().enumerate() {
        for (b, &k2) in ks.iter().enumerate() {
            let e = s.values()[a * n + b].norm_sqr();
            let k2sum = k1 * k1 + k2 * k2;
            total += e;
            grad += k2sum * e;
            if k2sum > cut * cut {
                high += e;
            }
        }
    }
    let area = grid.side_length().powi(2);
    GrowthRecord {
        t,
        sup: u.sup_norm(),
        kinetic: (grad * area).sqrt(),
        mass: u.mass(),
        tail: if total > 0.0 { high / total } else { 0.0 },
    }
}

/// Evolves `cfg` from `u0`, stopping when the sup-norm reaches `sup_threshold` or the
/// spectral tail exceeds [`TAIL_LIMIT`].
pub fn growth_probe(u0: &ComplexField, cfg: &SimConfig, sup_threshold: f64) -> Result<GrowthReport> {
    if !(sup_threshold > u0.sup_norm()) {
        return Err(Error::arg(format!(
            "threshold {sup_threshold} must exceed the initial sup-norm {}",
            u0.sup_norm()
        )));
    }
    let mut records = Vec::new();
    let mut stop = StopReason::Horizon;
    evolve_with(u0, cfg, |_, t, u| {
        let r = record(t, u);
        records.push(r);
        if r.sup >= sup_threshold {
            stop = StopReason::Threshold;
            return Ok(ControlFlow::Break(()));
        }
        if r.tail > TAIL_LIMIT {
            stop = StopReason::ResolutionLimit;
            return Ok(ControlFlow::Break(()));
        }
        Ok(ControlFlow::Continue(()))
    })?;
    let hit_time = (stop != StopReason::Horizon).then(|| records.last().expect("recorded").t);
    Ok(GrowthReport { records, stop, hit_time })
}

/// Growth probe under `g_eff = n^α g(n·)`; `cfg` supplies grid, step and horizon.
pub fn blowup_probe(
    spec: &CouplingSpec,
    alpha: f64,
    n: u32,
    u0: &ComplexField,
    cfg: &SimConfig,
    sup_threshold: f64,
) -> Result<GrowthReport> {
    let g = evaluate(spec, n, cfg.grid())?.scale_real((n as f64).powf(alpha));
    growth_probe(u0, &cfg.with_coupling(&g)?, sup_threshold)
}

/// Covariance defect of `v ↦ n^{1−α/2} v(n²t, nx)`, using the step `dt_v / n²` for the
/// rescaled run so both runs take the same number of steps.
pub fn scaling_symmetry_check(v: &Trajectory, n: u32, alpha: f64, spec: &CouplingSpec) -> Result<f64> {
    let nf = n as f64;
    scaling_symmetry_check_with_dt(v, n, alpha, spec, v.provenance().dt / (nf * nf))
}

/// As [`scaling_symmetry_check`] with an explicit step for the rescaled run.
///
/// `v` must solve `i∂t v + Δv = g(x)|v|²v` on its grid. The rescaled data
/// `w0(x) = n^{1−α/2} v(0, nx)` is evolved on the grid of side `L/n` under
/// `n^α g(n·)` up to `T/n²`, and the result is compared with `n^{1−α/2} v(T, n·)`.
pub fn scaling_symmetry_check_with_dt(
    v: &Trajectory,
    n: u32,
    alpha: f64,
    spec: &CouplingSpec,
    dt_w: f64,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::arg("n must be positive"));
    }
    let nf = n as f64;
    let small = v.grid().shrunk(nf).map_err(|e| Error::InvalidGrid(format!("companion grid: {e}")))?;
    let amp = nf.powf(1.0 - alpha / 2.0);
    let w0 = ComplexField::from_values(small, v.initial().values().to_vec())?.scale_real(amp);
    let target = ComplexField::from_values(small, v.last().values().to_vec())?.scale_real(amp);
    let g = evaluate(spec, n, &small)?.scale_real(nf.powf(alpha));
    let horizon = v.horizon() / (nf * nf);
    let steps = (horizon / dt_w).round().max(1.0) as usize;
    let cfg = SimConfig::new(small, dt_w, horizon, steps, &g)?.with_dealias(v.provenance().dealias);
    let w = evolve_final(&w0, &cfg)?;
    Ok(w.sub(&target)?.l2_norm() / w0.l2_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::TrigPoly;
    use crate::solver::evolve;
    use crate::spectral::Grid2D;
    use std::f64::consts::PI;

    #[test]
    fn defocusing_run_reaches_horizon() {
        let g = Grid2D::new(64, 8.0 * PI).unwrap();
        let u0 = ComplexField::gaussian(g, 1.0, 1.0);
        let cfg = SimConfig::homogeneous(g, 0.01, 0.5, 5, 1.0).unwrap();
        let r = blowup_probe(&TrigPoly::constant(1.0).into(), 2.0, 1, &u0, &cfg, 10.0).unwrap();
        assert_eq!(r.stop, StopReason::Horizon);
        assert_eq!(r.hit_time, None);
        assert!(r.max_sup() <= 2.0 * u0.sup_norm());
        assert!(r.max_mass_drift() < 1e-9);
        assert_eq!(r.records.len(), 11);
    }

    #[test]
    fn threshold_must_exceed_initial_sup() {
        let g = Grid2D::new(32, 8.0).unwrap();
        let u0 = ComplexField::gaussian(g, 2.0, 1.0);
        let cfg = SimConfig::homogeneous(g, 0.01, 0.1, 1, -1.0).unwrap();
        assert!(growth_probe(&u0, &cfg, 1.5).is_err());
    }

    #[test]
    fn unit_scale_is_reproducible() {
        let g = Grid2D::new(32, 8.0 * PI).unwrap();
        let spec: CouplingSpec = TrigPoly::cosine([1, 0], 1.0).plus_constant(1.0).into();
        let cfg = SimConfig::new(g, 0.01, 0.1, 10, &evaluate(&spec, 1, &g).unwrap()).unwrap();
        let v = evolve(&ComplexField::gaussian(g, 1.0, 1.0), &cfg).unwrap();
        assert_eq!(scaling_symmetry_check(&v, 1, 1.0, &spec).unwrap(), 0.0);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let g = Grid2D::new(64, 8.0 * PI).unwrap();
        let cfg = SimConfig::homogeneous(g, 0.01, 0.02, 1, 1.0).unwrap();
        let r = growth_probe(&ComplexField::gaussian(g, 1.0, 1.0), &cfg, 5.0).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("t,sup,kinetic,mass,tail\n"));
    }
}
