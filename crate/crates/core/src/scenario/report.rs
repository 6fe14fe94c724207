use std::fmt::Write as _;

use serde::Serialize;

/// Outcome of a single check within a scenario.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    /// The example or statement the check reproduces.
    pub anchor: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Sign and normalization conventions relevant to reading the residual.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub seed: u64,
}

/// Everything a scenario run produced, in execution order.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    pub samples: usize,
    /// Tolerance override in effect, if any.
    pub tolerance: Option<f64>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(scenario: &str, seed: u64, samples: usize, tolerance: Option<f64>) -> Self {
        Report { scenario: scenario.to_string(), seed, samples, tolerance, checks: Vec::new() }
    }

    /// Records `residual ≤ tolerance`.
    pub fn residual(&mut self, name: &str, anchor: &str, residual: f64, tolerance: f64) -> &mut Check {
        let pass = residual.is_finite() && residual <= tolerance;
        self.push(name, anchor, residual, tolerance, pass)
    }

    /// Records `residual > threshold`, for checks that something fails to hold.
    pub fn exceeds(&mut self, name: &str, anchor: &str, residual: f64, threshold: f64) -> &mut Check {
        let pass = residual.is_finite() && residual > threshold;
        self.push(name, anchor, residual, threshold, pass)
    }

    /// Records a yes/no outcome; the residual is 0 on success and 1 otherwise.
    pub fn flag(&mut self, name: &str, anchor: &str, pass: bool) -> &mut Check {
        self.push(name, anchor, if pass { 0.0 } else { 1.0 }, 0.0, pass)
    }

    fn push(&mut self, name: &str, anchor: &str, residual: f64, tolerance: f64, pass: bool) -> &mut Check {
        self.checks.push(Check {
            name: name.to_string(),
            anchor: anchor.to_string(),
            residual,
            tolerance,
            pass,
            notes: Vec::new(),
            seed: self.seed,
        });
        self.checks.last_mut().expect("just pushed")
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    /// One JSON object per check.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let mut record = serde_json::to_value(c).expect("checks serialize");
            record["scenario"] = serde_json::Value::String(self.scenario.clone());
            out.push_str(&record.to_string());
            out.push('\n');
        }
        out
    }

    pub fn summary_table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        let mut out = String::new();
        let _ = writeln!(out, "scenario {} (seed {}, {} samples)", self.scenario, self.seed, self.samples);
        let _ = writeln!(out, "{:<width$}  {:>12}  {:>10}  result", "check", "residual", "tol");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{:<width$}  {:>12.3e}  {:>10.1e}  {}",
                c.name,
                c.residual,
                c.tolerance,
                if c.pass { "pass" } else { "FAIL" }
            );
        }
        let failed = self.failures().len();
        let _ = writeln!(out, "{} checks, {} failed", self.checks.len(), failed);
        out
    }
}

impl Check {
    pub fn note(&mut self, text: &str) -> &mut Self {
        self.notes.push(text.to_string());
        self
    }
}
