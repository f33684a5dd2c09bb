//! Run configurations. Every file is JSON with `"schema_version": 1`; unknown keys are
//! rejected. A `periodic_sampled` coupling may give `samples_csv` (a path relative to
//! the config file) in place of inline `samples`.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::coupling::{check_resolution, trial_seed, AlloyBump, AlloyLaw, CouplingSpec, PeriodicSampled};
use crate::solver::SimConfig;
use crate::spectral::io::load_field;
use crate::spectral::{ComplexField, Grid2D};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

fn default_dt() -> f64 {
    1e-3
}
fn default_horizon() -> f64 {
    1.0
}
fn default_store_every() -> usize {
    10
}
fn one() -> f64 {
    1.0
}
fn one_u32() -> u32 {
    1
}
fn default_trials() -> usize {
    400
}
fn default_cutoff() -> f64 {
    2.0
}
fn default_spec_id() -> String {
    "spec".into()
}

/// Grid, step and horizon shared by every run of an experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimTemplate {
    pub grid: Grid2D,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_store_every")]
    pub store_every: usize,
    #[serde(default)]
    pub dealias: bool,
}

impl SimTemplate {
    pub fn new(grid: Grid2D) -> Self {
        Self { grid, dt: default_dt(), horizon: default_horizon(), store_every: default_store_every(), dealias: false }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validated()?;
        self.homogeneous(0.0).map(|_| ())
    }

    pub fn config(&self, g_field: &ComplexField) -> Result<SimConfig> {
        Ok(SimConfig::new(self.grid, self.dt, self.horizon, self.store_every, g_field)?.with_dealias(self.dealias))
    }

    pub fn homogeneous(&self, gbar: f64) -> Result<SimConfig> {
        Ok(SimConfig::homogeneous(self.grid, self.dt, self.horizon, self.store_every, gbar)?.with_dealias(self.dealias))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// `A·exp(−|x|²/(2w²))`
    Gaussian {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one")]
        width: f64,
    },
    /// A field in the binary field format.
    File { path: PathBuf },
}

impl Default for InitialData {
    fn default() -> Self {
        InitialData::Gaussian { amplitude: 1.0, width: 1.0 }
    }
}

impl InitialData {
    pub fn validate(&self) -> Result<()> {
        match *self {
            InitialData::Gaussian { amplitude, width } => {
                if !(amplitude > 0.0 && amplitude.is_finite()) {
                    return Err(Error::Config(format!("gaussian amplitude must be positive, got {amplitude}")));
                }
                if !(width > 0.0 && width.is_finite()) {
                    return Err(Error::Config(format!("gaussian width must be positive, got {width}")));
                }
                Ok(())
            }
            InitialData::File { .. } => Ok(()),
        }
    }

    pub fn build(&self, grid: &Grid2D) -> Result<ComplexField> {
        match self {
            InitialData::Gaussian { amplitude, width } => Ok(ComplexField::gaussian(*grid, *amplitude, *width)),
            InitialData::File { path } => {
                let (_, f) = load_field(path)?;
                if f.grid() != grid {
                    return Err(Error::Config(format!("{}: field grid differs from the run grid", path.display())));
                }
                Ok(f)
            }
        }
    }

    fn resolve(&mut self, base: &Path) {
        if let InitialData::File { path } = self {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
    }
}

/// Behaviour shared by the per-command configs.
pub trait RunConfig: Serialize + DeserializeOwned {
    const COMMAND: &'static str;

    fn validate(&self) -> Result<()>;

    /// Output directory named in the file, if any.
    fn outputs(&self) -> Option<&Path>;

    /// Replaces every seed in the config with ones derived from `seed`.
    fn reseed(&mut self, _seed: u64) {}

    fn resolve_paths(&mut self, _base: &Path) {}
}

fn check_n_values(n_values: &[u32]) -> Result<()> {
    if n_values.is_empty() {
        return Err(Error::Config("n_values is empty".into()));
    }
    if n_values[0] == 0 {
        return Err(Error::Config("n values must be positive".into()));
    }
    if n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!("n_values must be distinct and ascending, got {n_values:?}")));
    }
    Ok(())
}

fn reseed_spec(spec: &mut CouplingSpec, seed: u64, counter: &mut u64) {
    match spec {
        CouplingSpec::Alloy(a) => {
            a.seed = trial_seed(seed, *counter);
            *counter += 1;
        }
        CouplingSpec::Convex(c) => c.terms.iter_mut().for_each(|t| reseed_spec(&mut t.spec, seed, counter)),
        _ => {}
    }
}

fn check_spec(spec: &CouplingSpec) -> Result<()> {
    spec.validate().map_err(|e| Error::Config(e.to_string()))
}

/// One run of `g(n·)` saved as a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub schema_version: u32,
    pub coupling: CouplingSpec,
    #[serde(default = "one_u32")]
    pub n: u32,
    pub sim: SimTemplate,
    #[serde(default)]
    pub initial_data: InitialData,
    #[serde(default)]
    pub outputs: Option<PathBuf>,
}

impl RunConfig for SimulateConfig {
    const COMMAND: &'static str = "simulate";

    fn validate(&self) -> Result<()> {
        check_spec(&self.coupling)?;
        self.sim.validate()?;
        self.initial_data.validate()?;
        check_resolution(&self.coupling, self.n, &self.sim.grid)
    }

    fn outputs(&self) -> Option<&Path> {
        self.outputs.as_deref()
    }

    fn reseed(&mut self, seed: u64) {
        reseed_spec(&mut self.coupling, seed, &mut 0);
    }

    fn resolve_paths(&mut self, base: &Path) {
        self.initial_data.resolve(base);
    }
}

/// Homogenization sweep over `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub schema_version: u32,
    pub coupling: CouplingSpec,
    pub n_values: Vec<u32>,
    pub sim: SimTemplate,
    #[serde(default)]
    pub initial_data: InitialData,
    #[serde(default)]
    pub outputs: Option<PathBuf>,
    /// Ball radius for the resonance column; defaults to `L/4`.
    #[serde(default)]
    pub resonance_radius: Option<f64>,
}

impl SweepConfig {
    pub fn new(coupling: CouplingSpec, n_values: Vec<u32>, sim: SimTemplate) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            coupling,
            n_values,
            sim,
            initial_data: InitialData::default(),
            outputs: None,
            resonance_radius: None,
        }
    }

    pub fn radius(&self) -> f64 {
        self.resonance_radius.unwrap_or(0.25 * self.sim.grid.side_length())
    }
}

impl RunConfig for SweepConfig {
    const COMMAND: &'static str = "sweep";

    fn validate(&self) -> Result<()> {
        check_spec(&self.coupling)?;
        self.sim.validate()?;
        self.initial_data.validate()?;
        check_n_values(&self.n_values)?;
        let r = self.radius();
        if !(r > 0.0 && r <= 0.5 * self.sim.grid.side_length()) {
            return Err(Error::Config(format!("resonance radius {r} must lie in (0, L/2]")));
        }
        for &n in &self.n_values {
            check_resolution(&self.coupling, n, &self.sim.grid)?;
        }
        Ok(())
    }

    fn outputs(&self) -> Option<&Path> {
        self.outputs.as_deref()
    }

    fn reseed(&mut self, seed: u64) {
        reseed_spec(&mut self.coupling, seed, &mut 0);
    }

    fn resolve_paths(&mut self, base: &Path) {
        self.initial_data.resolve(base);
    }
}

/// Resonance sup-norms over `n` on a ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonanceConfig {
    pub schema_version: u32,
    #[serde(default = "default_spec_id")]
    pub spec_id: String,
    pub coupling: CouplingSpec,
    pub n_values: Vec<u32>,
    pub radius: f64,
    pub grid: Grid2D,
    #[serde(default)]
    pub outputs: Option<PathBuf>,
}

impl RunConfig for ResonanceConfig {
    const COMMAND: &'static str = "resonance";

    fn validate(&self) -> Result<()> {
        check_spec(&self.coupling)?;
        self.grid.validated()?;
        check_n_values(&self.n_values)?;
        if !(self.radius > 0.0 && self.radius <= 0.5 * self.grid.side_length()) {
            return Err(Error::Config(format!("radius {} must lie in (0, L/2]", self.radius)));
        }
        for &n in &self.n_values {
            check_resolution(&self.coupling, n, &self.grid)?;
        }
        Ok(())
    }

    fn outputs(&self) -> Option<&Path> {
        self.outputs.as_deref()
    }

    fn reseed(&mut self, seed: u64) {
        reseed_spec(&mut self.coupling, seed, &mut 0);
    }
}

/// Monte-Carlo fourth moments of the alloy resonance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlloyMcConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub bump: AlloyBump,
    pub law: AlloyLaw,
    /// Littlewood-Paley cutoff `N`.
    #[serde(default = "default_cutoff")]
    pub cutoff: f64,
    pub n_values: Vec<u32>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    pub grid: Grid2D,
    #[serde(default)]
    pub outputs: Option<PathBuf>,
}

impl RunConfig for AlloyMcConfig {
    const COMMAND: &'static str = "alloy-mc";

    fn validate(&self) -> Result<()> {
        self.bump.validate()?;
        self.law.validate()?;
        self.grid.validated()?;
        check_n_values(&self.n_values)?;
        if self.trials < crate::resonance::MIN_TRIALS {
            return Err(Error::Config(format!(
                "trials must be at least {}, got {}",
                crate::resonance::MIN_TRIALS,
                self.trials
            )));
        }
        if !(self.cutoff > 0.0 && self.cutoff.is_finite()) {
            return Err(Error::Config(format!("cutoff must be positive, got {}", self.cutoff)));
        }
        Ok(())
    }

    fn outputs(&self) -> Option<&Path> {
        self.outputs.as_deref()
    }

    fn reseed(&mut self, seed: u64) {
        self.seed = seed;
    }
}

/// Growth probe under `n^α g(n·)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowupConfig {
    pub schema_version: u32,
    pub coupling: CouplingSpec,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default = "one_u32")]
    pub n: u32,
    pub sim: SimTemplate,
    #[serde(default)]
    pub initial_data: InitialData,
    pub threshold: f64,
    #[serde(default)]
    pub outputs: Option<PathBuf>,
}

impl RunConfig for BlowupConfig {
    const COMMAND: &'static str = "blowup";

    fn validate(&self) -> Result<()> {
        check_spec(&self.coupling)?;
        self.sim.validate()?;
        self.initial_data.validate()?;
        if !self.alpha.is_finite() {
            return Err(Error::Config("alpha must be finite".into()));
        }
        if !(self.threshold.is_finite() && self.threshold > 0.0) {
            return Err(Error::Config(format!("threshold must be positive, got {}", self.threshold)));
        }
        check_resolution(&self.coupling, self.n, &self.sim.grid)
    }

    fn outputs(&self) -> Option<&Path> {
        self.outputs.as_deref()
    }

    fn reseed(&mut self, seed: u64) {
        reseed_spec(&mut self.coupling, seed, &mut 0);
    }

    fn resolve_paths(&mut self, base: &Path) {
        self.initial_data.resolve(base);
    }
}

/// Property suites to run; empty means all.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropsConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub tags: Vec<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub outputs: Option<PathBuf>,
}

impl RunConfig for PropsConfig {
    const COMMAND: &'static str = "props";

    fn validate(&self) -> Result<()> {
        for t in &self.tags {
            if !super::props::TAGS.contains(&t.as_str()) {
                return Err(Error::Config(format!("unknown property tag {t:?}; known: {:?}", super::props::TAGS)));
            }
        }
        Ok(())
    }

    fn outputs(&self) -> Option<&Path> {
        self.outputs.as_deref()
    }

    fn reseed(&mut self, seed: u64) {
        self.seed = seed;
    }
}

/// Replaces `samples_csv` paths inside `periodic_sampled` couplings with inline samples.
fn inline_samples(v: &mut Value, base: &Path) -> Result<()> {
    match v {
        Value::Object(map) => {
            if map.get("kind").and_then(Value::as_str) == Some("periodic_sampled") {
                if let Some(p) = map.remove("samples_csv") {
                    if map.contains_key("samples") {
                        return Err(Error::Config("give either samples or samples_csv, not both".into()));
                    }
                    let rel = p.as_str().ok_or_else(|| Error::Config("samples_csv must be a path".into()))?;
                    let path = base.join(rel);
                    let sampled = PeriodicSampled::from_csv_path(&path)?;
                    map.insert("samples".into(), serde_json::to_value(sampled.samples)?);
                }
            }
            map.values_mut().try_for_each(|x| inline_samples(x, base))
        }
        Value::Array(items) => items.iter_mut().try_for_each(|x| inline_samples(x, base)),
        _ => Ok(()),
    }
}

/// Parses and validates a config from JSON text; relative paths resolve against `base`.
pub fn parse_config<C: RunConfig>(text: &str, base: &Path) -> Result<C> {
    let mut value: Value = serde_json::from_str(text).map_err(|e| Error::Config(format!("malformed JSON: {e}")))?;
    match value.get("schema_version").and_then(Value::as_u64) {
        Some(v) if v == SCHEMA_VERSION as u64 => {}
        Some(v) => return Err(Error::Config(format!("unsupported schema_version {v}; expected {SCHEMA_VERSION}"))),
        None => return Err(Error::Config("missing schema_version".into())),
    }
    inline_samples(&mut value, base).map_err(|e| match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    })?;
    let mut cfg: C = serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?;
    cfg.resolve_paths(base);
    cfg.validate().map_err(|e| match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    })?;
    Ok(cfg)
}

pub fn load_config<C: RunConfig>(path: &Path) -> Result<C> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text, path.parent().unwrap_or(Path::new(".")))
}

/// SHA-256 of the config's canonical JSON (keys sorted, no whitespace).
pub fn config_hash<C: Serialize>(cfg: &C) -> Result<String> {
    let value = serde_json::to_value(cfg)?;
    let text = serde_json::to_string(&value)?;
    Ok(hex::encode(Sha256::digest(text.as_bytes())))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SWEEP: &str = r#"{
        "schema_version": 1,
        "coupling": {"kind": "trig_poly", "coeffs": [{"k": [0, 0], "c": [1.0, 0.0]}]},
        "n_values": [2, 4],
        "sim": {"grid": {"N_g": 32, "L": 12.0}, "dt": 0.01, "horizon": 0.1, "store_every": 5}
    }"#;

    #[test]
    fn defaults_are_filled_in() {
        let c: SweepConfig = parse_config(SWEEP, Path::new(".")).unwrap();
        assert_eq!(c.initial_data, InitialData::Gaussian { amplitude: 1.0, width: 1.0 });
        assert_eq!(c.radius(), 3.0);
        assert!(!c.sim.dealias);
    }

    #[test]
    fn unknown_keys_and_versions_are_rejected() {
        let typo = SWEEP.replace("\"n_values\"", "\"n_vals\"");
        assert!(matches!(parse_config::<SweepConfig>(&typo, Path::new(".")), Err(Error::Config(_))));
        let v2 = SWEEP.replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(matches!(parse_config::<SweepConfig>(&v2, Path::new(".")), Err(Error::Config(_))));
        let nested = SWEEP.replace("\"dt\": 0.01", "\"dt\": 0.01, \"step\": 1");
        assert!(parse_config::<SweepConfig>(&nested, Path::new(".")).is_err());
    }

    #[test]
    fn n_values_must_ascend_and_resolve() {
        let bad = SWEEP.replace("[2, 4]", "[4, 2]");
        assert!(parse_config::<SweepConfig>(&bad, Path::new(".")).is_err());
        let cos = SWEEP.replace(
            r#"[{"k": [0, 0], "c": [1.0, 0.0]}]"#,
            r#"[{"k": [0, 0], "c": [1.0, 0.0]}, {"k": [2, 0], "c": [0.5, 0.0]}, {"k": [-2, 0], "c": [0.5, 0.0]}]"#,
        );
        // Nyquist of the 32-point grid on L = 12 is 8.38: n = 4 reaches 8, n = 8 reaches 16
        assert!(parse_config::<SweepConfig>(&cos, Path::new(".")).is_ok());
        let cos8 = cos.replace("[2, 4]", "[2, 8]");
        assert!(matches!(parse_config::<SweepConfig>(&cos8, Path::new(".")), Err(Error::Config(_))));
    }

    #[test]
    fn samples_csv_is_inlined() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("g.csv"), "1,2\n3,4\n").unwrap();
        let text = r#"{
            "schema_version": 1,
            "coupling": {"kind": "periodic_sampled", "samples_csv": "g.csv"},
            "n_values": [1, 2, 3],
            "radius": 1.0,
            "grid": {"N_g": 32, "L": 12.0}
        }"#;
        let c: ResonanceConfig = parse_config(text, dir.path()).unwrap();
        match c.coupling {
            CouplingSpec::PeriodicSampled(p) => assert_eq!(p.samples, vec![vec![1.0, 2.0], vec![3.0, 4.0]]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a: SweepConfig = parse_config(SWEEP, Path::new(".")).unwrap();
        let b: SweepConfig = parse_config(&SWEEP.replace("    ", ""), Path::new(".")).unwrap();
        assert_eq!(config_hash(&a).unwrap(), config_hash(&b).unwrap());
        let mut c = a.clone();
        c.n_values = vec![2, 3];
        assert_ne!(config_hash(&a).unwrap(), config_hash(&c).unwrap());
        assert_eq!(config_hash(&a).unwrap().len(), 64);
    }

    #[test]
    fn reseed_reaches_nested_alloys() {
        let alloy = CouplingSpec::Alloy(crate::coupling::AlloySpec {
            bump: AlloyBump::default(),
            law: AlloyLaw::Uniform { low: 0.0, high: 2.0 },
            seed: 1,
        });
        let spec = crate::coupling::convex_combine([(0.5, alloy.clone()), (0.5, alloy)]).unwrap();
        let mut c = SweepConfig::new(spec, vec![1], SimTemplate::new(Grid2D::new(64, 16.0).unwrap()));
        c.reseed(42);
        let CouplingSpec::Convex(cv) = &c.coupling else { unreachable!() };
        let seeds: Vec<u64> = cv
            .terms
            .iter()
            .map(|t| match &t.spec {
                CouplingSpec::Alloy(a) => a.seed,
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(seeds, vec![trial_seed(42, 0), trial_seed(42, 1)]);
    }
}
