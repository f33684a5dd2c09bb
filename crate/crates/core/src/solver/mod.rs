//! Strang split-step integration of `i∂t u + Δu = g(x)|u|²u` on the periodic grid.
//!
//! One step is `e^{i(dt/2)Δ} ∘ 𝒩_dt ∘ e^{i(dt/2)Δ}` with the exact nonlinear flow
//! `𝒩_dt(w) = w·exp(−i g |w|² dt)`. Inside [`evolve`] consecutive half steps are fused,
//! so a run costs one forward and one inverse FFT per step plus one pair per stored
//! instant.

mod probe;
mod trajectory;

use std::ops::ControlFlow;

pub use probe::{
    blowup_probe, growth_probe, scaling_symmetry_check, scaling_symmetry_check_with_dt,
    GrowthRecord, GrowthReport, StopReason,
};
pub use trajectory::{load_trajectory, Provenance, Trajectory, TrajectoryManifest};

use crate::spectral::{ComplexField, Fft2, Grid2D};
use crate::{Complex64, Error, Result};

const SNAP_TOL: f64 = 1e-9;

/// Run parameters for [`evolve`].
#[derive(Clone, Debug)]
pub struct SimConfig {
    grid: Grid2D,
    dt: f64,
    steps: usize,
    store_every: usize,
    g: Vec<f64>,
    constant: Option<f64>,
    dealias: bool,
}

impl SimConfig {
    /// `horizon / dt` must be an integer to within `1e-9` and a multiple of `store_every`.
    pub fn new(
        grid: Grid2D,
        dt: f64,
        horizon: f64,
        store_every: usize,
        g_field: &ComplexField,
    ) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::arg(format!("dt must be positive, got {dt}")));
        }
        if !(horizon.is_finite() && horizon >= dt) {
            return Err(Error::arg(format!("horizon {horizon} must be at least dt = {dt}")));
        }
        let ratio = horizon / dt;
        let steps = ratio.round();
        if (ratio - steps).abs() > SNAP_TOL * steps.max(1.0) {
            return Err(Error::arg(format!("horizon/dt = {ratio} is not an integer")));
        }
        let steps = steps as usize;
        if store_every == 0 || steps % store_every != 0 {
            return Err(Error::arg(format!(
                "store_every = {store_every} must divide the step count {steps}"
            )));
        }
        if g_field.grid() != &grid {
            return Err(Error::GridMismatch);
        }
        let scale = g_field.max_real().max(1.0);
        if g_field.max_imag() > 1e-12 * scale {
            return Err(Error::arg("coupling field must be real-valued"));
        }
        let g: Vec<f64> = g_field.values().iter().map(|z| z.re).collect();
        let constant = g.first().copied().filter(|c| g.iter().all(|v| v == c));
        Ok(Self { grid, dt, steps, store_every, g, constant, dealias: false })
    }

    /// Configuration with the constant coupling `ḡ`.
    pub fn homogeneous(grid: Grid2D, dt: f64, horizon: f64, store_every: usize, gbar: f64) -> Result<Self> {
        Self::new(grid, dt, horizon, store_every, &ComplexField::constant(grid, Complex64::new(gbar, 0.0)))
    }

    /// Applies the 2/3 truncation after every linear substep.
    pub fn with_dealias(mut self, dealias: bool) -> Self {
        self.dealias = dealias;
        self
    }

    /// Same run with another coupling field.
    pub fn with_coupling(&self, g_field: &ComplexField) -> Result<Self> {
        let horizon = self.horizon();
        Ok(Self::new(self.grid, self.dt, horizon, self.store_every, g_field)?.with_dealias(self.dealias))
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn horizon(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    pub fn store_every(&self) -> usize {
        self.store_every
    }

    pub fn dealias(&self) -> bool {
        self.dealias
    }

    /// `Some(ḡ)` when the coupling field is one constant.
    pub fn coupling_constant(&self) -> Option<f64> {
        self.constant
    }

    pub fn coupling(&self) -> ComplexField {
        ComplexField::from_values_unchecked(
            self.grid,
            self.g.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            dt: self.dt,
            store_every: self.store_every,
            coupling_constant: self.constant,
            dealias: self.dealias,
        }
    }
}

/// Linear and nonlinear substeps on raw sample buffers.
pub(crate) struct Stepper {
    fft: Fft2,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
    g: Vec<f64>,
    dt: f64,
}

impl Stepper {
    pub(crate) fn new(grid: &Grid2D, dt: f64, g: &[f64], dealias: bool) -> Self {
        let ks = grid.wavenumbers_fft_order();
        let n = grid.points_per_axis();
        let norm = 1.0 / grid.len() as f64;
        let keep = |slot: usize| !dealias || grid.signed_index(slot).unsigned_abs() as usize * 3 <= n;
        let mut half = Vec::with_capacity(grid.len());
        let mut full = Vec::with_capacity(grid.len());
        for (a, &k1) in ks.iter().enumerate() {
            for (b, &k2) in ks.iter().enumerate() {
                let k2sum = k1 * k1 + k2 * k2;
                let mask = if keep(a) && keep(b) { norm } else { 0.0 };
                half.push(Complex64::from_polar(mask, -0.5 * dt * k2sum));
                full.push(Complex64::from_polar(mask, -dt * k2sum));
            }
        }
        Self { fft: Fft2::new(n), half, full, g: g.to_vec(), dt }
    }

    fn linear(&mut self, v: &mut [Complex64], half: bool) {
        self.fft.forward(v);
        let symbol = if half { &self.half } else { &self.full };
        for (z, m) in v.iter_mut().zip(symbol) {
            *z *= m;
        }
        self.fft.inverse(v);
    }

    /// Exact flow of `i∂t w = g|w|²w`; returns false if a non-finite value appears.
    fn nonlinear(&self, v: &mut [Complex64]) -> bool {
        let mut finite = true;
        for (z, &g) in v.iter_mut().zip(&self.g) {
            let phase = -g * z.norm_sqr() * self.dt;
            *z *= Complex64::from_polar(1.0, phase);
            finite &= z.re.is_finite() && z.im.is_finite();
        }
        finite
    }

    fn step(&mut self, v: &mut [Complex64]) -> bool {
        self.linear(v, true);
        let ok = self.nonlinear(v);
        self.linear(v, true);
        ok
    }
}

/// One Strang step; `dt` may be zero or negative (backward step).
pub fn strang_step(u: &ComplexField, dt: f64, g_field: &ComplexField) -> Result<ComplexField> {
    u.same_grid(g_field)?;
    if !dt.is_finite() {
        return Err(Error::arg("dt must be finite"));
    }
    if dt == 0.0 {
        return Ok(u.clone());
    }
    let g: Vec<f64> = g_field.values().iter().map(|z| z.re).collect();
    let mut stepper = Stepper::new(u.grid(), dt, &g, false);
    let mut v = u.values().to_vec();
    if !stepper.step(&mut v) {
        return Err(Error::NonFinite { step: 1, time: dt });
    }
    Ok(ComplexField::from_values_unchecked(*u.grid(), v))
}

/// Runs `cfg` from `u0`, calling `observer(m, t_m, u(t_m))` at every stored instant,
/// starting with `m = 0`. The observer may stop the run early; returns the number of
/// steps taken.
pub fn evolve_with<F>(u0: &ComplexField, cfg: &SimConfig, mut observer: F) -> Result<usize>
where
    F: FnMut(usize, f64, &ComplexField) -> Result<ControlFlow<()>>,
{
    if u0.grid() != cfg.grid() {
        return Err(Error::GridMismatch);
    }
    if !u0.is_finite() {
        return Err(Error::NonFinite { step: 0, time: 0.0 });
    }
    if observer(0, 0.0, u0)?.is_break() {
        return Ok(0);
    }
    let grid = *cfg.grid();
    let spacing = cfg.dt * cfg.store_every as f64;
    let mut stepper = Stepper::new(&grid, cfg.dt, &cfg.g, cfg.dealias);
    let mut v = u0.values().to_vec();
    stepper.linear(&mut v, true);
    for step in 1..=cfg.steps {
        if !stepper.nonlinear(&mut v) {
            return Err(Error::NonFinite { step, time: step as f64 * cfg.dt });
        }
        if step % cfg.store_every == 0 {
            stepper.linear(&mut v, true);
            let m = step / cfg.store_every;
            let u = ComplexField::from_values_unchecked(grid, v);
            if observer(m, m as f64 * spacing, &u)?.is_break() {
                return Ok(step);
            }
            v = u.into_values();
            if step < cfg.steps {
                stepper.linear(&mut v, true);
            }
        } else {
            stepper.linear(&mut v, false);
        }
    }
    Ok(cfg.steps)
}

/// Runs `cfg` from `u0` and keeps every stored instant.
pub fn evolve(u0: &ComplexField, cfg: &SimConfig) -> Result<Trajectory> {
    let mut fields = Vec::with_capacity(cfg.steps / cfg.store_every + 1);
    evolve_with(u0, cfg, |_, _, u| {
        fields.push(u.clone());
        Ok(ControlFlow::Continue(()))
    })?;
    Trajectory::new(fields, cfg.dt * cfg.store_every as f64, cfg.provenance())
}

/// Final state of a run without storing intermediate fields.
pub fn evolve_final(u0: &ComplexField, cfg: &SimConfig) -> Result<ComplexField> {
    let mut last = None;
    let total = cfg.steps / cfg.store_every;
    evolve_with(u0, cfg, |m, _, u| {
        if m == total {
            last = Some(u.clone());
        }
        Ok(ControlFlow::Continue(()))
    })?;
    Ok(last.expect("final instant is always stored"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::free_propagator;
    use std::f64::consts::PI;

    fn grid() -> Grid2D {
        Grid2D::new(64, 8.0 * PI).unwrap()
    }

    #[test]
    fn zero_coupling_is_free_flow() {
        let g = grid();
        let u = ComplexField::gaussian(g, 1.0, 1.0);
        let zero = ComplexField::zeros(g);
        let a = strang_step(&u, 0.01, &zero).unwrap();
        let b = free_propagator(&u, 0.01);
        assert!(a.max_abs_diff(&b).unwrap() < 1e-12);
        assert_eq!(strang_step(&u, 0.0, &zero).unwrap(), u);
    }

    #[test]
    fn step_conserves_mass_and_reverses() {
        let g = grid();
        let u = ComplexField::gaussian(g, 2.0, 1.5).add(&ComplexField::plane_wave(g, 0.5, 0.25)).unwrap();
        let coupling = ComplexField::from_real_fn(g, |x, y| 1.0 + (x + 0.5 * y).cos());
        let v = strang_step(&u, 0.01, &coupling).unwrap();
        assert!(((v.mass() - u.mass()) / u.mass()).abs() < 1e-12);
        let back = strang_step(&v, -0.01, &coupling).unwrap();
        assert!(back.max_abs_diff(&u).unwrap() < 1e-10);
    }

    #[test]
    fn config_snaps_and_rejects() {
        let g = grid();
        let c = SimConfig::homogeneous(g, 1e-3, 1.0, 10, 1.0).unwrap();
        assert_eq!(c.steps(), 1000);
        assert_eq!(c.coupling_constant(), Some(1.0));
        assert!(SimConfig::homogeneous(g, 0.3, 1.0, 1, 1.0).is_err());
        assert!(SimConfig::homogeneous(g, 0.1, 1.0, 3, 1.0).is_err());
        assert!(SimConfig::homogeneous(g, 2.0, 1.0, 1, 1.0).is_err());
        let wavy = ComplexField::from_real_fn(g, |x, _| x.cos());
        assert_eq!(SimConfig::new(g, 0.1, 1.0, 1, &wavy).unwrap().coupling_constant(), None);
        assert!(SimConfig::new(g, 0.1, 1.0, 1, &ComplexField::plane_wave(g, 1.0, 0.0)).is_err());
    }

    #[test]
    fn single_step_trajectory() {
        let g = grid();
        let u = ComplexField::gaussian(g, 1.0, 1.0);
        let cfg = SimConfig::homogeneous(g, 0.05, 0.05, 1, 1.0).unwrap();
        let traj = evolve(&u, &cfg).unwrap();
        assert_eq!(traj.len(), 2);
        assert_eq!(traj.fields()[0], u);
        let direct = strang_step(&u, 0.05, &cfg.coupling()).unwrap();
        assert!(traj.fields()[1].max_abs_diff(&direct).unwrap() < 1e-13);
    }

    #[test]
    fn fused_steps_match_repeated_steps() {
        let g = grid();
        let u = ComplexField::gaussian(g, 1.5, 1.0);
        let coupling = ComplexField::from_real_fn(g, |x, _| 1.0 + x.cos());
        let cfg = SimConfig::new(g, 0.01, 0.2, 5, &coupling).unwrap();
        let traj = evolve(&u, &cfg).unwrap();
        let mut w = u.clone();
        for _ in 0..20 {
            w = strang_step(&w, 0.01, &coupling).unwrap();
        }
        assert_eq!(traj.len(), 5);
        assert!(traj.last().max_abs_diff(&w).unwrap() < 1e-12);
        assert!((traj.times()[4] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn blowing_up_state_is_reported() {
        let g = Grid2D::new(32, 4.0).unwrap();
        let u = ComplexField::constant(g, Complex64::new(1e200, 0.0));
        let cfg = SimConfig::homogeneous(g, 0.1, 0.2, 1, 1.0).unwrap();
        assert!(matches!(evolve(&u, &cfg), Err(Error::NonFinite { step: 1, .. })));
    }

    #[test]
    fn dealiasing_truncates_high_modes() {
        let g = Grid2D::new(32, 2.0 * PI).unwrap();
        let u = ComplexField::plane_wave(g, 14.0, 0.0);
        let cfg = SimConfig::homogeneous(g, 0.01, 0.01, 1, 0.0).unwrap().with_dealias(true);
        let out = evolve_final(&u, &cfg).unwrap();
        assert!(out.sup_norm() < 1e-12);
    }
}
