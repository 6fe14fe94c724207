//! Scenario configurations and the runner that turns each worked example into
//! a list of pass/fail checks.

mod report;
mod suites;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use report::{Check, Report};

/// A scenario as read from its TOML file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// Built-in chart the scenario is posed on, if it uses a single one.
    #[serde(default)]
    pub chart: Option<String>,
    pub seed: u64,
    pub samples: usize,
    /// Overrides every per-check tolerance when present.
    #[serde(default)]
    pub tol: Option<f64>,
    /// Scenario-specific inputs such as coefficient functions.
    #[serde(default)]
    pub params: BTreeMap<String, String>,
}

impl ScenarioConfig {
    pub fn from_toml(src: &str) -> Result<Self> {
        toml::from_str(src).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn param(&self, key: &str) -> Result<&str> {
        self.params
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::Config(format!("scenario {} needs parameter {key:?}", self.name)))
    }

    /// The tolerance to apply to a check whose default is `default`.
    pub fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

const SCENARIOS: &[(&str, &str)] = &[
    ("s3-hopf", include_str!("../../scenarios/s3-hopf.toml")),
    ("s3-selfdual", include_str!("../../scenarios/s3-selfdual.toml")),
    ("s2-annulus", include_str!("../../scenarios/s2-annulus.toml")),
    ("hopf-surface", include_str!("../../scenarios/hopf-surface.toml")),
    ("gibbons-hawking", include_str!("../../scenarios/gibbons-hawking.toml")),
    ("buscher-random", include_str!("../../scenarios/buscher-random.toml")),
    ("reduction-suite", include_str!("../../scenarios/reduction-suite.toml")),
];

pub fn scenario_names() -> Vec<&'static str> {
    SCENARIOS.iter().map(|(n, _)| *n).collect()
}

/// Command-line overrides applied on top of a scenario file.
#[derive(Clone, Debug, Default)]
pub struct Flags {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub tol: Option<f64>,
    /// Directory searched for `<name>.toml` before the built-in scenarios.
    pub scenario_dir: Option<std::path::PathBuf>,
}

/// Reads a scenario, preferring `<dir>/<name>.toml` when a directory is given.
pub fn load(name: &str, dir: Option<&Path>) -> Result<ScenarioConfig> {
    if let Some(dir) = dir {
        let path = dir.join(format!("{name}.toml"));
        if path.exists() {
            let cfg = ScenarioConfig::from_toml(&std::fs::read_to_string(&path)?)?;
            if !scenario_names().contains(&cfg.name.as_str()) {
                return Err(Error::UnknownScenario(cfg.name));
            }
            return Ok(cfg);
        }
    }
    let src = SCENARIOS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
        .ok_or_else(|| Error::UnknownScenario(name.to_string()))?;
    ScenarioConfig::from_toml(src)
}

pub fn run(name: &str, flags: &Flags) -> Result<Report> {
    let mut cfg = load(name, flags.scenario_dir.as_deref())?;
    if let Some(seed) = flags.seed {
        cfg.seed = seed;
    }
    if let Some(n) = flags.samples {
        if n == 0 {
            return Err(Error::Config("--samples must be positive".into()));
        }
        cfg.samples = n;
    }
    if flags.tol.is_some() {
        cfg.tol = flags.tol;
    }
    if let Some(chart) = &cfg.chart {
        crate::models::chart(chart)?;
    }
    run_config(&cfg)
}

pub fn run_config(cfg: &ScenarioConfig) -> Result<Report> {
    match cfg.name.as_str() {
        "s3-hopf" => suites::s3_hopf(cfg),
        "s3-selfdual" => suites::s3_selfdual(cfg),
        "s2-annulus" => suites::s2_annulus(cfg),
        "hopf-surface" => suites::hopf_surface(cfg),
        "gibbons-hawking" => suites::gibbons_hawking(cfg),
        "buscher-random" => suites::buscher_random(cfg),
        "reduction-suite" => suites::reduction_suite(cfg),
        other => Err(Error::UnknownScenario(other.to_string())),
    }
}

pub use suites::{annulus_log_radius, random_circle_metric};

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_scenario_parses() {
        for name in scenario_names() {
            let cfg = load(name, None).unwrap();
            assert_eq!(cfg.name, name);
        }
        assert!(matches!(load("nope", None), Err(Error::UnknownScenario(_))));
    }

    #[test]
    fn directory_override_is_used() {
        let dir = tempfile::tempdir().unwrap();
        let text = SCENARIOS[0].1.replace("seed = ", "seed = 1");
        std::fs::write(dir.path().join("s3-hopf.toml"), text).unwrap();
        let cfg = load("s3-hopf", Some(dir.path())).unwrap();
        assert_ne!(cfg.seed, load("s3-hopf", None).unwrap().seed);
    }
}
