//! Experiment orchestration: configs, sweeps, reports, persistence and the CLI.
//!
//! Every command runs inside a bounded rayon pool. Independent runs or trials execute in
//! parallel and are collected in config order, so outputs do not depend on the thread
//! count. Each command writes its CSV/JSON outputs plus a `manifest.json` that records
//! the config hash, crate version, wall-clock time and every file produced.

pub mod cli;
pub mod config;
mod props;

use std::io::Write;
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use config::{
    config_hash, load_config, parse_config, AlloyMcConfig, BlowupConfig, InitialData, PropsConfig, ResonanceConfig,
    RunConfig, SimTemplate, SimulateConfig, SweepConfig, SCHEMA_VERSION,
};
pub use props::{run_property_suite, PropertyCheck, PropertyLedger, TAGS};

use crate::coupling::{evaluate, CouplingSpec};
use crate::norms::{duhamel_report, l4_spacetime, norm_report, strichartz_norm, L4DiffAccumulator, NormReport};
use crate::resonance::{alloy_moment_estimate, decay_fit, resonance_sup_norm, uniform_bound_check, DecayFit};
use crate::resonance::{MomentEstimate, ResonanceReport};
use crate::solver::{blowup_probe, evolve, evolve_with, GrowthReport, Trajectory};
use crate::spectral::Grid2D;
use crate::{Error, Result};

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "NLS_HOMOG_THREADS";

fn sci(v: f64) -> String {
    format!("{v:.17e}")
}

fn opt_sci(v: Option<f64>) -> String {
    v.map(sci).unwrap_or_default()
}

fn csv_flush<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush().map_err(|e| Error::io("<csv>", e))
}

/// One `n` of a homogenization sweep; the values are absent when the run failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: u32,
    /// `‖uₙ − u‖_{L⁴_{t,x}}`
    pub l4_diff: Option<f64>,
    pub duhamel_error: Option<f64>,
    /// Duhamel functional from every other stored instant.
    pub duhamel_coarse: Option<f64>,
    pub resonance_sup: Option<f64>,
    pub runtime_seconds: f64,
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomogenizedNorms {
    pub mass: f64,
    pub l4_spacetime: f64,
    pub strichartz: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config_hash: String,
    pub gbar: f64,
    pub homogenized: HomogenizedNorms,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }

    /// The `l4_diff` column, if every row succeeded.
    pub fn l4_diffs(&self) -> Option<Vec<f64>> {
        self.rows.iter().map(|r| r.l4_diff).collect()
    }

    pub fn duhamel_errors(&self) -> Option<Vec<f64>> {
        self.rows.iter().map(|r| r.duhamel_error).collect()
    }

    /// Columns `n, l4_diff, duhamel_error, resonance_sup, status`. Runtimes are left out
    /// so that identical configs give identical bytes.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["n", "l4_diff", "duhamel_error", "resonance_sup", "status"])?;
        for r in &self.rows {
            let status = match &r.error {
                None => "ok".to_owned(),
                Some(e) => format!("failed: {e}"),
            };
            out.write_record([
                r.n.to_string(),
                opt_sci(r.l4_diff),
                opt_sci(r.duhamel_error),
                opt_sci(r.resonance_sup),
                status,
            ])?;
        }
        csv_flush(out)
    }
}

fn sweep_row(cfg: &SweepConfig, n: u32, u0: &crate::spectral::ComplexField, hom: &Trajectory) -> Result<SweepRow> {
    let grid = cfg.sim.grid;
    let g = evaluate(&cfg.coupling, n, &grid)?;
    let sim = cfg.sim.config(&g)?;
    let mut acc = L4DiffAccumulator::new(hom);
    evolve_with(u0, &sim, |m, _, u| {
        acc.push(m, u)?;
        Ok(ControlFlow::Continue(()))
    })?;
    let l4 = acc.finish()?;
    let duhamel = duhamel_report(&cfg.coupling, n, hom)?;
    let (res, _) = resonance_sup_norm(&cfg.coupling, n, cfg.radius(), &grid)?;
    Ok(SweepRow {
        n,
        l4_diff: Some(l4),
        duhamel_error: Some(duhamel.value),
        duhamel_coarse: duhamel.coarse,
        resonance_sup: Some(res),
        runtime_seconds: 0.0,
        error: None,
    })
}

/// Homogenized run once, then one run per `n`, compared on the stored instants.
///
/// Rows run in parallel on the current rayon pool and are returned in `n_values` order.
/// A failing row is recorded with its error; the other rows still run. Only a failure
/// of the homogenized run aborts the sweep.
pub fn run_homogenization_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    sweep_validated(cfg)
}

fn sweep_validated(cfg: &SweepConfig) -> Result<SweepResult> {
    let grid = cfg.sim.grid;
    let u0 = cfg.initial_data.build(&grid)?;
    let gbar = cfg.coupling.mean_value();
    let hom = evolve(&u0, &cfg.sim.homogeneous(gbar)?)?;
    let homogenized = HomogenizedNorms {
        mass: hom.initial().mass(),
        l4_spacetime: l4_spacetime(&hom)?,
        strichartz: strichartz_norm(&hom)?,
    };
    let rows = cfg
        .n_values
        .par_iter()
        .map(|&n| {
            let start = Instant::now();
            let mut row = sweep_row(cfg, n, &u0, &hom).unwrap_or_else(|e| SweepRow {
                n,
                l4_diff: None,
                duhamel_error: None,
                duhamel_coarse: None,
                resonance_sup: None,
                runtime_seconds: 0.0,
                error: Some(e.to_string()),
            });
            row.runtime_seconds = start.elapsed().as_secs_f64();
            row
        })
        .collect();
    Ok(SweepResult { config_hash: config_hash(cfg)?, gbar, homogenized, rows })
}

/// Resonance sup-norms of `spec` on the ball of radius `radius`.
pub fn run_resonance_report(
    spec_id: &str,
    spec: &CouplingSpec,
    n_values: &[u32],
    radius: f64,
    grid: &Grid2D,
) -> Result<ResonanceReport> {
    ResonanceReport::build(spec_id, spec, n_values, radius, grid)
}

/// Moment estimates per `n` and the decay fit of the estimates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    pub rows: Vec<MomentEstimate>,
    pub fit: Option<DecayFit>,
    pub fit_error: Option<String>,
}

impl MomentTable {
    pub fn all_within_bound(&self) -> bool {
        self.rows.iter().all(MomentEstimate::within_bound)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "n",
            "trials",
            "estimate",
            "stderr",
            "four_corner",
            "four_corner_stderr",
            "exact",
            "bound",
            "within_bound",
        ])?;
        for r in &self.rows {
            out.write_record([
                r.n.to_string(),
                r.trials.to_string(),
                sci(r.estimate),
                sci(r.stderr),
                sci(r.four_corner),
                sci(r.four_corner_stderr),
                sci(r.exact),
                sci(r.bound),
                r.within_bound().to_string(),
            ])?;
        }
        csv_flush(out)
    }
}

/// Monte-Carlo fourth moments for every `n`; trials run in parallel.
pub fn run_alloy_mc(cfg: &AlloyMcConfig) -> Result<MomentTable> {
    cfg.validate()?;
    let rows = cfg
        .n_values
        .iter()
        .map(|&n| alloy_moment_estimate(&cfg.bump, &cfg.law, cfg.cutoff, n, cfg.trials, cfg.seed, &cfg.grid))
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.estimate)).collect();
    let (fit, fit_error) = match decay_fit(&pairs) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(MomentTable { rows, fit, fit_error })
}

pub fn run_blowup_probe(cfg: &BlowupConfig) -> Result<GrowthReport> {
    cfg.validate()?;
    let grid = cfg.sim.grid;
    let u0 = cfg.initial_data.build(&grid)?;
    let template = cfg.sim.homogeneous(0.0)?;
    blowup_probe(&cfg.coupling, cfg.alpha, cfg.n, &u0, &template, cfg.threshold)
}

/// One `g(n·)` run with its spacetime norms.
pub fn run_simulation(cfg: &SimulateConfig) -> Result<(Trajectory, NormReport)> {
    cfg.validate()?;
    let grid = cfg.sim.grid;
    let u0 = cfg.initial_data.build(&grid)?;
    let g = evaluate(&cfg.coupling, cfg.n, &grid)?;
    let traj = evolve(&u0, &cfg.sim.config(&g)?)?;
    let norms = norm_report(&traj)?;
    Ok((traj, norms))
}

/// A config that can be executed and persisted by [`execute`].
pub trait Command: RunConfig + Sync {
    type Output: Send;

    fn run(&self) -> Result<Self::Output>;

    /// Writes the outputs into `dir`, returning their paths relative to `dir`.
    fn persist(&self, output: &Self::Output, dir: &Path) -> Result<Vec<String>>;

    /// Whether the run completed but some part of it failed.
    fn partial_failure(_output: &Self::Output) -> bool {
        false
    }

    /// Command-specific manifest fields.
    fn manifest_extra(_output: &Self::Output) -> Value {
        Value::Null
    }
}

fn write_file(dir: &Path, name: &str, write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<String> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    let path = dir.join(name);
    std::fs::write(&path, buf).map_err(|e| Error::io(&path, e))?;
    Ok(name.to_owned())
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<String> {
    write_file(dir, name, |buf| {
        serde_json::to_writer_pretty(&mut *buf, value)?;
        buf.push(b'\n');
        Ok(())
    })
}

impl Command for SimulateConfig {
    type Output = (Trajectory, NormReport);

    fn run(&self) -> Result<Self::Output> {
        run_simulation(self)
    }

    fn persist(&self, (traj, norms): &Self::Output, dir: &Path) -> Result<Vec<String>> {
        traj.save(&dir.join("trajectory"))?;
        Ok(vec!["trajectory/manifest.json".into(), write_json(dir, "norms.json", norms)?])
    }
}

impl Command for SweepConfig {
    type Output = SweepResult;

    fn run(&self) -> Result<SweepResult> {
        run_homogenization_sweep(self)
    }

    fn persist(&self, out: &SweepResult, dir: &Path) -> Result<Vec<String>> {
        let csv = write_file(dir, "sweep.csv", |b| out.write_csv(b))?;
        let summary = serde_json::json!({
            "config_hash": out.config_hash,
            "gbar": out.gbar,
            "homogenized": out.homogenized,
            "failed_rows": out.failed_rows(),
        });
        Ok(vec![csv, write_json(dir, "sweep_summary.json", &summary)?])
    }

    fn partial_failure(out: &SweepResult) -> bool {
        out.failed_rows() > 0
    }

    fn manifest_extra(out: &SweepResult) -> Value {
        let runtimes: serde_json::Map<String, Value> =
            out.rows.iter().map(|r| (r.n.to_string(), Value::from(r.runtime_seconds))).collect();
        serde_json::json!({ "row_runtime_seconds": runtimes })
    }
}

/// Report plus the uniform-bound value of the same spec.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceOutput {
    pub report: ResonanceReport,
    /// Largest `(sup_x |(-Δ+1)⁻¹g(n·)| + sup_x |∇(-Δ+1)⁻¹g(n·)|) / sup|g|` over `n`.
    pub uniform_bound: f64,
}

impl Command for ResonanceConfig {
    type Output = ResonanceOutput;

    fn run(&self) -> Result<ResonanceOutput> {
        self.validate()?;
        let report = run_resonance_report(&self.spec_id, &self.coupling, &self.n_values, self.radius, &self.grid)?;
        let uniform_bound = uniform_bound_check(&self.coupling, &self.n_values, &self.grid)?;
        Ok(ResonanceOutput { report, uniform_bound })
    }

    fn persist(&self, out: &ResonanceOutput, dir: &Path) -> Result<Vec<String>> {
        let csv = write_file(dir, "resonance.csv", |b| out.report.write_csv(b))?;
        let fit = out.report.fit;
        let summary = serde_json::json!({
            "spec_id": out.report.spec_id,
            "ball_radius": out.report.ball_radius,
            "slope": fit.map(|f| f.slope),
            "intercept": fit.map(|f| f.intercept),
            "residual": fit.map(|f| f.residual),
            "fit_error": out.report.fit_error,
            "decay_at_least_quadratic": fit.map(|f| f.slope <= -1.7),
            "uniform_bound": out.uniform_bound,
            "uniform_bound_within_one": out.uniform_bound <= 1.0 + 1e-12,
        });
        Ok(vec![csv, write_json(dir, "resonance_summary.json", &summary)?])
    }
}

impl Command for AlloyMcConfig {
    type Output = MomentTable;

    fn run(&self) -> Result<MomentTable> {
        run_alloy_mc(self)
    }

    fn persist(&self, out: &MomentTable, dir: &Path) -> Result<Vec<String>> {
        let csv = write_file(dir, "alloy_moments.csv", |b| out.write_csv(b))?;
        let summary = serde_json::json!({
            "fit": out.fit,
            "fit_error": out.fit_error,
            "all_within_bound": out.all_within_bound(),
        });
        Ok(vec![csv, write_json(dir, "alloy_summary.json", &summary)?])
    }
}

impl Command for BlowupConfig {
    type Output = GrowthReport;

    fn run(&self) -> Result<GrowthReport> {
        run_blowup_probe(self)
    }

    fn persist(&self, out: &GrowthReport, dir: &Path) -> Result<Vec<String>> {
        let csv = write_file(dir, "growth.csv", |b| out.write_csv(b))?;
        let summary = serde_json::json!({
            "stop": out.stop.as_str(),
            "hit_time": out.hit_time,
            "max_sup": out.max_sup(),
            "max_mass_drift": out.max_mass_drift(),
            "records": out.records.len(),
        });
        Ok(vec![csv, write_json(dir, "growth_summary.json", &summary)?])
    }
}

impl Command for PropsConfig {
    type Output = PropertyLedger;

    fn run(&self) -> Result<PropertyLedger> {
        self.validate()?;
        let tags: Vec<&str> = self.tags.iter().map(String::as_str).collect();
        run_property_suite(&tags, self.seed)
    }

    fn persist(&self, out: &PropertyLedger, dir: &Path) -> Result<Vec<String>> {
        Ok(vec![write_file(dir, "props.csv", |b| out.write_csv(b))?])
    }

    fn partial_failure(out: &PropertyLedger) -> bool {
        !out.all_passed()
    }
}

/// Record of one command execution, written as `manifest.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub schema_version: u32,
    pub crate_version: String,
    pub config_hash: String,
    pub config: Value,
    pub threads: usize,
    pub wall_clock_seconds: f64,
    pub partial_failure: bool,
    /// Paths relative to the manifest's directory.
    pub outputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub extra: Value,
}

/// Worker count from [`THREADS_ENV`], else the available parallelism.
pub fn default_threads() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&k| k > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|k| k.get()).unwrap_or(1))
}

/// Runs `cfg` on a pool of `threads` workers and writes its outputs and manifest to `dir`.
pub fn execute<C: Command>(cfg: &C, dir: &Path, threads: usize) -> Result<(C::Output, RunManifest)> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::arg(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let output = pool.install(|| cfg.run())?;
    let wall = start.elapsed().as_secs_f64();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let outputs = cfg.persist(&output, dir)?;
    let manifest = RunManifest {
        command: C::COMMAND.to_owned(),
        schema_version: SCHEMA_VERSION,
        crate_version: env!("CARGO_PKG_VERSION").to_owned(),
        config_hash: config_hash(cfg)?,
        config: serde_json::to_value(cfg)?,
        threads: threads.max(1),
        wall_clock_seconds: wall,
        partial_failure: C::partial_failure(&output),
        outputs,
        extra: C::manifest_extra(&output),
    };
    write_json(dir, "manifest.json", &manifest)?;
    Ok((output, manifest))
}

/// Output directory: the explicit one, else the config's, else `./out`.
pub fn output_dir<C: RunConfig>(cfg: &C, explicit: Option<&Path>) -> PathBuf {
    explicit.map(Path::to_path_buf).or_else(|| cfg.outputs().map(Path::to_path_buf)).unwrap_or_else(|| "out".into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::TrigPoly;

    fn small_sweep(spec: CouplingSpec) -> SweepConfig {
        let grid = Grid2D::new(32, 4.0 * std::f64::consts::PI).unwrap();
        let sim = SimTemplate { grid, dt: 0.01, horizon: 0.2, store_every: 5, dealias: false };
        SweepConfig::new(spec, vec![1, 2, 4], sim)
    }

    #[test]
    fn constant_coupling_sweep_is_exact() {
        let r = run_homogenization_sweep(&small_sweep(TrigPoly::constant(1.0).into())).unwrap();
        for row in &r.rows {
            assert!(row.l4_diff.unwrap() <= 1e-10);
            assert!(row.duhamel_error.unwrap() <= 1e-10);
        }
        // ∫ exp(−|x|²) = π
        assert!((r.homogenized.mass - std::f64::consts::PI).abs() < 1e-6);
    }

    #[test]
    fn failing_row_does_not_abort() {
        let mut cfg = small_sweep(TrigPoly::cosine([1, 0], 1.0).plus_constant(1.0).into());
        cfg.n_values = vec![1, 2, 16];
        assert!(matches!(run_homogenization_sweep(&cfg), Err(Error::Nyquist { .. })));
        // past validation, n = 16 fails the Nyquist guard inside its row
        let r = sweep_validated(&cfg).unwrap();
        assert_eq!(r.failed_rows(), 1);
        assert!(r.rows[..2].iter().all(|row| row.error.is_none() && row.l4_diff.unwrap() > 0.0));
        assert!(r.rows[2].error.as_deref().unwrap().contains("Nyquist"));
        assert_eq!(r.l4_diffs(), None);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().lines().nth(3).unwrap().starts_with("16,,,,failed:"));
    }

    #[test]
    fn manifest_lists_every_output() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small_sweep(TrigPoly::cosine([1, 0], 1.0).plus_constant(1.0).into());
        let (result, manifest) = execute(&cfg, dir.path(), 2).unwrap();
        assert_eq!(result.rows.len(), 3);
        assert_eq!(manifest.outputs, vec!["sweep.csv", "sweep_summary.json"]);
        let mut on_disk: Vec<String> = std::fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .filter(|n| n != "manifest.json")
            .collect();
        on_disk.sort();
        assert_eq!(on_disk, manifest.outputs);
        assert_eq!(manifest.config_hash, result.config_hash);
    }
}
