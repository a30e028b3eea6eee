use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const REPORT_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// Outcome of one check. Failures carry at least one witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub parameters: BTreeMap<String, Value>,
    pub status: Status,
    pub summary: String,
    pub witnesses: Vec<Value>,
    pub metrics: BTreeMap<String, Value>,
    pub timing_ms: u64,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            parameters: BTreeMap::new(),
            status: Status::Pass,
            summary: String::new(),
            witnesses: Vec::new(),
            metrics: BTreeMap::new(),
            timing_ms: 0,
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.parameters.insert(key.into(), serde_json::to_value(value).expect("serializable parameter"));
        self
    }

    pub fn metric(&mut self, key: &str, value: impl Serialize) {
        self.metrics.insert(key.into(), serde_json::to_value(value).expect("serializable metric"));
    }

    /// Record a violation; the first one flips the status to fail.
    pub fn fail(&mut self, witness: impl Serialize) {
        self.status = Status::Fail;
        self.witnesses.push(serde_json::to_value(witness).expect("serializable witness"));
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    /// Run `body` and store its wall time.
    pub fn timed<F: FnOnce(&mut Self)>(mut self, body: F) -> Self {
        let start = Instant::now();
        body(&mut self);
        self.timing_ms = start.elapsed().as_millis() as u64;
        self
    }
}

/// Top-level document written by `--report`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub config: Value,
    pub checks: Vec<CheckReport>,
}

impl Report {
    pub fn new(config: impl Serialize, checks: Vec<CheckReport>) -> Self {
        Self {
            version: REPORT_VERSION.into(),
            config: serde_json::to_value(config).expect("serializable config"),
            checks,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckReport::passed)
    }

    /// Report with every timing field zeroed and wall-clock metrics
    /// removed, for determinism comparisons.
    pub fn without_timing(&self) -> Self {
        let mut out = self.clone();
        for c in &mut out.checks {
            c.timing_ms = 0;
            c.metrics.retain(|k, _| !k.starts_with(crate::checks::TIMING_METRIC_PREFIX));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skipped => "SKIP",
            };
            out.push_str(&format!("[{tag}] {} ({} ms): {}\n", c.name, c.timing_ms, c.summary));
            for w in c.witnesses.iter().take(3) {
                out.push_str(&format!("    witness: {w}\n"));
            }
        }
        out
    }
}
