//! The experiment configuration shared by every subcommand, and its digest.

use std::path::PathBuf;

use balayage::digest::digest_bytes;
use serde::{Deserialize, Serialize};

use crate::failure::Failure;

/// Everything that determines a run's output.  Two runs with equal
/// configurations produce byte-identical output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `clean`, `balayage`, `verify`, `classify`, `battery` or `examples`.
    pub operation: String,
    /// Instance file (JSON instance document).
    #[serde(default)]
    pub instance: Option<PathBuf>,
    /// Gallery family used instead of an instance file.
    #[serde(default)]
    pub gallery: Option<String>,
    /// Gallery parameters as `key=value`.
    #[serde(default)]
    pub params: Vec<String>,
    /// Region `Λ` as site names; overrides the instance's region.
    #[serde(default)]
    pub lambda: Option<Vec<String>>,
    /// Schedule spec: `round_robin[:eps]`, `full[:eps]` or `profiles`.
    #[serde(default = "default_schedule")]
    pub schedule: String,
    /// Step count (schedule steps, or series terms for the battery).
    #[serde(default)]
    pub steps: Option<usize>,
    /// Balayage tail tolerance.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Kernel-step budget for the balayage series.
    #[serde(default = "default_max_terms")]
    pub max_terms: usize,
    /// Marker level cap for cloud checks.
    #[serde(default = "default_level_cap")]
    pub level_cap: usize,
    /// Seed for every random choice.
    #[serde(default)]
    pub seed: u64,
    /// Verifier selection: `all` or a comma-separated list of names.
    #[serde(default = "default_name")]
    pub name: String,
    /// Random input draws per verifier.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_schedule() -> String {
    "round_robin".to_string()
}
fn default_tol() -> f64 {
    1e-10
}
fn default_max_terms() -> usize {
    100_000
}
fn default_level_cap() -> usize {
    3
}
fn default_name() -> String {
    "all".to_string()
}
fn default_samples() -> usize {
    1
}

impl ExperimentConfig {
    /// A configuration with every option at its default.
    pub fn new(operation: &str) -> Self {
        Self {
            operation: operation.to_string(),
            instance: None,
            gallery: None,
            params: Vec::new(),
            lambda: None,
            schedule: default_schedule(),
            steps: None,
            tol: default_tol(),
            max_terms: default_max_terms(),
            level_cap: default_level_cap(),
            seed: 0,
            name: default_name(),
            samples: default_samples(),
        }
    }

    /// Replaces every field present in the JSON object `text`.
    pub fn override_with(self, text: &str) -> Result<Self, Failure> {
        let patch: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Failure::contract(format!("config file: {e}")))?;
        let serde_json::Value::Object(patch) = patch else {
            return Err(Failure::contract("config file must hold a JSON object"));
        };
        let mut base = serde_json::to_value(&self).expect("configs serialize");
        let obj = base.as_object_mut().expect("configs serialize to objects");
        for (k, v) in patch {
            obj.insert(k, v);
        }
        let merged: Self =
            serde_json::from_value(base).map_err(|e| Failure::contract(format!("config file: {e}")))?;
        if merged.operation != self.operation {
            return Err(Failure::contract(format!(
                "config file selects operation `{}` but the command is `{}`",
                merged.operation, self.operation
            )));
        }
        Ok(merged)
    }

    /// Hex SHA-256 of the canonical (compact, field-ordered) JSON form.
    pub fn digest(&self) -> String {
        digest_bytes(serde_json::to_string(self).expect("configs serialize").as_bytes())
    }
}
