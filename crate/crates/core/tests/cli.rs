use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nls-homog"))
}

const SWEEP: &str = r#"{
  "schema_version": 1,
  "coupling": {
    "kind": "trig_poly",
    "coeffs": [
      {"k": [0, 0], "c": [1.0, 0.0]},
      {"k": [1, 0], "c": [0.5, 0.0]},
      {"k": [-1, 0], "c": [0.5, 0.0]}
    ]
  },
  "n_values": [1, 2, 4],
  "sim": {"grid": {"N_g": 32, "L": 12.566370614359172}, "dt": 0.01, "horizon": 0.2, "store_every": 5}
}"#;

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn sweep_outputs_are_byte_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sweep.json", SWEEP);
    let mut csvs = Vec::new();
    for (k, threads) in ["1", "3"].iter().enumerate() {
        let out = dir.path().join(format!("out{k}"));
        let st = bin().args(["sweep", "--config", &cfg, "--threads", threads, "--out"]).arg(&out).status().unwrap();
        assert_eq!(st.code(), Some(0));
        csvs.push(std::fs::read(out.join("sweep.csv")).unwrap());
        let manifest: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["command"], "sweep");
        assert_eq!(manifest["outputs"], serde_json::json!(["sweep.csv", "sweep_summary.json"]));
        assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
    }
    assert_eq!(csvs[0], csvs[1]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let typo = write(dir.path(), "typo.json", &SWEEP.replace("\"n_values\"", "\"n_valus\""));
    let st = bin().args(["sweep", "--config", &typo, "--out"]).arg(dir.path().join("a")).status().unwrap();
    assert_eq!(st.code(), Some(1));

    // validation passes but the threshold is below the initial sup-norm, a run failure
    let blowup = r#"{
      "schema_version": 1,
      "coupling": {"kind": "trig_poly", "coeffs": [{"k": [0, 0], "c": [1.0, 0.0]}]},
      "sim": {"grid": {"N_g": 32, "L": 12.0}, "dt": 0.01, "horizon": 0.1, "store_every": 1},
      "threshold": 0.5
    }"#;
    let b = write(dir.path(), "blowup.json", blowup);
    let st = bin().args(["blowup", "--config", &b, "--out"]).arg(dir.path().join("b")).status().unwrap();
    assert_eq!(st.code(), Some(2));

    let st = bin().args(["props", "--tags", "coupling,norms", "--out"]).arg(dir.path().join("c")).status().unwrap();
    assert_eq!(st.code(), Some(0));
    assert!(dir.path().join("c/props.csv").exists());
}

#[test]
fn simulate_writes_a_loadable_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let sim = r#"{
      "schema_version": 1,
      "coupling": {"kind": "trig_poly", "coeffs": [{"k": [0, 0], "c": [1.0, 0.0]}]},
      "sim": {"grid": {"N_g": 32, "L": 12.0}, "dt": 0.01, "horizon": 0.1, "store_every": 5}
    }"#;
    let cfg = write(dir.path(), "sim.json", sim);
    let out = dir.path().join("sim");
    let st = bin().args(["simulate", "--config", &cfg, "--out"]).arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let traj = nls_homog::solver::load_trajectory(&out.join("trajectory/manifest.json")).unwrap();
    assert_eq!(traj.len(), 3);
    assert_eq!(traj.provenance().coupling_constant, Some(1.0));
}

#[test]
fn shipped_configs_load_and_validate() {
    use nls_homog::harness::config::{load_config, RunConfig};
    use nls_homog::harness::{AlloyMcConfig, BlowupConfig, PropsConfig, ResonanceConfig, SimulateConfig, SweepConfig};

    fn check<C: RunConfig>(path: &Path) {
        let cfg: C = load_config(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        cfg.validate().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_str().unwrap().to_owned();
        if !name.ends_with(".json") {
            continue;
        }
        match name.split('_').next().unwrap() {
            "simulate" => check::<SimulateConfig>(&path),
            "sweep" => check::<SweepConfig>(&path),
            "resonance" => check::<ResonanceConfig>(&path),
            "alloy" => check::<AlloyMcConfig>(&path),
            "blowup" => check::<BlowupConfig>(&path),
            "props" => check::<PropsConfig>(&path),
            other => panic!("no command for config prefix {other}"),
        }
        seen += 1;
    }
    assert!(seen >= 6);
}
