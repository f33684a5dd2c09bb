//! Command-line front end.
//!
//! ```text
//! nls-homog <simulate|sweep|resonance|alloy-mc|blowup|props> [--config FILE] [--out DIR]
//!           [--threads K] [--seed U64]
//! ```
//!
//! Exit codes: 0 success, 1 config error, 2 run failure, 3 property-suite failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use super::config::{load_config, RunConfig, PropsConfig, SCHEMA_VERSION};
use super::{default_threads, execute, output_dir, Command, THREADS_ENV};
use super::{AlloyMcConfig, BlowupConfig, ResonanceConfig, SimulateConfig, SweepConfig};
use crate::Error;

pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_RUN: u8 = 2;
pub const EXIT_PROPS: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "nls-homog", version, about = "Homogenization experiments for the 2D inhomogeneous cubic NLS")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Verb,

    /// JSON config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory; overrides the config's `outputs`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads.
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,

    /// Replaces every seed in the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Evolve one coupling and save the trajectory with its norms.
    Simulate,
    /// Homogenization sweep over n.
    Sweep,
    /// Resonance sup-norms and decay fit.
    Resonance,
    /// Alloy fourth-moment Monte-Carlo.
    AlloyMc,
    /// Growth probe under n^α g(n·).
    Blowup,
    /// Property suites; the config may restrict the tags.
    Props {
        /// Suites to run, e.g. `--tags spectral,solver`.
        #[arg(long, value_delimiter = ',')]
        tags: Vec<String>,
    },
}

/// Outcome class of a run, mapped onto the process exit code.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Run(String),
    Properties(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Run(_) => EXIT_RUN,
            Failure::Properties(_) => EXIT_PROPS,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "config error: {m}"),
            Failure::Run(m) => write!(f, "run failed: {m}"),
            Failure::Properties(m) => write!(f, "property suite failed: {m}"),
        }
    }
}

fn classify(e: Error) -> Failure {
    match e {
        Error::Config(m) => Failure::Config(m),
        other => Failure::Run(other.to_string()),
    }
}

fn load<C: RunConfig>(path: Option<&Path>, seed: Option<u64>) -> Result<C, Failure> {
    let path = path.ok_or_else(|| Failure::Config("--config is required for this command".into()))?;
    let mut cfg: C = load_config(path).map_err(classify)?;
    if let Some(s) = seed {
        cfg.reseed(s);
    }
    Ok(cfg)
}

fn run_command<C: Command>(cli: &Cli, cfg: C) -> Result<(C::Output, PathBuf), Failure> {
    let dir = output_dir(&cfg, cli.out.as_deref());
    let threads = cli.threads.filter(|&k| k > 0).unwrap_or_else(default_threads);
    let (out, manifest) = execute(&cfg, &dir, threads).map_err(classify)?;
    println!("{}: wrote {} output(s) to {} in {:.2}s", C::COMMAND, manifest.outputs.len(), dir.display(), manifest.wall_clock_seconds);
    if manifest.partial_failure && C::COMMAND != PropsConfig::COMMAND {
        return Err(Failure::Run(format!("some {} rows failed; see {}", C::COMMAND, dir.join("manifest.json").display())));
    }
    Ok((out, dir))
}

fn simple<C: Command>(cli: &Cli) -> Result<(), Failure> {
    let cfg: C = load(cli.config.as_deref(), cli.seed)?;
    run_command(cli, cfg).map(|_| ())
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Verb::Simulate => simple::<SimulateConfig>(cli),
        Verb::Sweep => simple::<SweepConfig>(cli),
        Verb::Resonance => simple::<ResonanceConfig>(cli),
        Verb::AlloyMc => simple::<AlloyMcConfig>(cli),
        Verb::Blowup => simple::<BlowupConfig>(cli),
        Verb::Props { tags } => {
            let mut cfg: PropsConfig = match cli.config.as_deref() {
                Some(_) => load(cli.config.as_deref(), cli.seed)?,
                None => PropsConfig { schema_version: SCHEMA_VERSION, seed: cli.seed.unwrap_or(0), ..Default::default() },
            };
            if !tags.is_empty() {
                cfg.tags = tags.clone();
            }
            cfg.validate().map_err(classify)?;
            let (ledger, _) = run_command(cli, cfg)?;
            for c in &ledger.checks {
                println!("{} {}/{}: {}", if c.passed { "PASS" } else { "FAIL" }, c.tag, c.name, c.detail);
            }
            if ledger.all_passed() {
                Ok(())
            } else {
                let names: Vec<String> = ledger.failures().map(|c| format!("{}/{}", c.tag, c.name)).collect();
                Err(Failure::Properties(names.join(", ")))
            }
        }
    }
}

/// Parses `std::env::args`, runs, and converts the outcome into an exit code.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("nls-homog: {f}");
            ExitCode::from(f.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("nls-homog").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_parse_after_the_verb() {
        let c = cli(&["sweep", "--config", "a.json", "--out", "o", "--threads", "3", "--seed", "7"]);
        assert!(matches!(c.command, Verb::Sweep));
        assert_eq!((c.threads, c.seed), (Some(3), Some(7)));
        let p = cli(&["props", "--tags", "spectral,norms"]);
        assert!(matches!(p.command, Verb::Props { ref tags } if tags == &["spectral", "norms"]));
    }

    #[test]
    fn missing_or_bad_config_is_exit_one() {
        let c = cli(&["sweep"]);
        assert_eq!(run(&c).unwrap_err().code(), EXIT_CONFIG);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(&path, r#"{"schema_version": 1, "bogus": true}"#).unwrap();
        let c = cli(&["resonance", "--config", path.to_str().unwrap()]);
        assert_eq!(run(&c).unwrap_err().code(), EXIT_CONFIG);
        let c = cli(&["props", "--tags", "nope", "--out", dir.path().to_str().unwrap()]);
        assert_eq!(run(&c).unwrap_err().code(), EXIT_CONFIG);
    }
}
