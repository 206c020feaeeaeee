use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// A test set and the values measured on it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub set: String,
    pub values: BTreeMap<String, f64>,
}

impl Witness {
    pub fn new(set: impl Into<String>) -> Self {
        Witness { set: set.into(), values: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.values.insert(key.to_string(), value);
        self
    }
}

/// Result of a checker run. A failing report always has a witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub margins: BTreeMap<String, f64>,
    /// Full per-set table, when the checker produces one.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub table: Vec<Witness>,
    /// Knobs the run was made with (seed, resolution, ...).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub config: BTreeMap<String, serde_json::Value>,
}

impl CheckReport {
    pub fn new(check: &str) -> Self {
        CheckReport {
            check: check.to_string(),
            verdict: Verdict::Pass,
            witnesses: Vec::new(),
            margins: BTreeMap::new(),
            table: Vec::new(),
            config: BTreeMap::new(),
        }
    }

    pub fn margin(&mut self, key: &str, value: f64) {
        self.margins.insert(key.to_string(), value);
    }

    pub fn config(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.config.insert(key.to_string(), value.into());
    }

    /// Sets the verdict. A failure without witnesses gets one holding the
    /// margins.
    pub fn conclude(mut self, pass: bool) -> Self {
        self.verdict = if pass { Verdict::Pass } else { Verdict::Fail };
        if !pass && self.witnesses.is_empty() {
            self.witnesses.push(Witness { set: "summary".into(), values: self.margins.clone() });
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}
