//! Report document written by every command.

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

#[derive(Serialize)]
pub struct Inputs {
    pub hash: String,
    pub mode: String,
}

#[derive(Serialize)]
pub struct CheckResult {
    pub check: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<Vec<String>>,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct Summary {
    pub max_residual: f64,
    pub checks: usize,
    pub failures: usize,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Inputs,
    pub parameters: Map<String, Value>,
    pub n_guarantee: Value,
    pub caps: Map<String, Value>,
    pub warnings: Vec<String>,
    pub results: Vec<CheckResult>,
    pub summary: Summary,
    pub details: Map<String, Value>,
}

/// Collects checks and metadata while a command runs.
pub struct ReportBuilder {
    command: String,
    hasher: Sha256,
    pub mode: String,
    pub parameters: Map<String, Value>,
    pub n_guarantee: Value,
    pub caps: Map<String, Value>,
    pub warnings: Vec<String>,
    pub results: Vec<CheckResult>,
    pub details: Map<String, Value>,
}

impl ReportBuilder {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            hasher: Sha256::new(),
            mode: "exact".to_string(),
            parameters: Map::new(),
            n_guarantee: Value::Null,
            caps: Map::new(),
            warnings: Vec::new(),
            results: Vec::new(),
            details: Map::new(),
        }
    }

    /// Feeds input bytes (file contents or a canonical parameter string) into
    /// the provenance hash.
    pub fn hash_input(&mut self, bytes: &[u8]) {
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(bytes);
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) {
        self.parameters.insert(key.to_string(), value.into());
    }

    pub fn cap(&mut self, key: &str, value: impl Into<Value>) {
        self.caps.insert(key.to_string(), value.into());
    }

    pub fn detail(&mut self, key: &str, value: impl Into<Value>) {
        self.details.insert(key.to_string(), value.into());
    }

    pub fn check(&mut self, check: impl Into<String>, residual: f64, pass: bool) {
        self.results.push(CheckResult { check: check.into(), word: None, residual, pass });
    }

    pub fn word_check(&mut self, word: Vec<String>, residual: f64, pass: bool) {
        self.results.push(CheckResult { check: "word".into(), word: Some(word), residual, pass });
    }

    pub fn finish(self) -> Report {
        let failures = self.results.iter().filter(|r| !r.pass).count();
        let max_residual = self.results.iter().map(|r| r.residual).fold(0.0, f64::max);
        Report {
            command: self.command,
            inputs: Inputs { hash: hex::encode(self.hasher.finalize()), mode: self.mode },
            parameters: self.parameters,
            n_guarantee: self.n_guarantee,
            caps: self.caps,
            warnings: self.warnings,
            summary: Summary { max_residual, checks: self.results.len(), failures, pass: failures == 0 },
            results: self.results,
            details: self.details,
        }
    }
}
