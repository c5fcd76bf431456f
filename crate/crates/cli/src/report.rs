use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::table::Table;

/// One pass/fail assertion made by a command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub command: String,
    pub name: String,
    pub passed: bool,
    pub measured: Option<f64>,
    pub detail: String,
}

/// Everything a command produces before anything is written to disk.
#[derive(Debug, Default)]
pub struct CommandOutput {
    pub result: Value,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
    pub plots: Vec<(String, String)>,
}

impl CommandOutput {
    pub fn check(&mut self, command: &str, name: &str, passed: bool, measured: Option<f64>, detail: String) {
        self.checks.push(Check {
            command: command.to_string(),
            name: name.to_string(),
            passed,
            measured,
            detail,
        });
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_sha256: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new(config_text: &str, seed: u64) -> Self {
        let digest = Sha256::digest(config_text.as_bytes());
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            config_sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
            seed,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub provenance: Provenance,
    pub commands: Vec<String>,
    pub results: BTreeMap<String, Value>,
    pub acceptance: Vec<Check>,
    pub failed: Vec<String>,
    pub passed: bool,
}

impl Report {
    pub fn new(provenance: Provenance) -> Self {
        Self {
            provenance,
            commands: Vec::new(),
            results: BTreeMap::new(),
            acceptance: Vec::new(),
            failed: Vec::new(),
            passed: true,
        }
    }

    pub fn absorb(&mut self, name: &str, out: &CommandOutput) {
        self.commands.push(name.to_string());
        self.results.insert(name.to_string(), out.result.clone());
        for c in &out.checks {
            if !c.passed {
                self.passed = false;
                self.failed.push(format!("{}.{}", c.command, c.name));
            }
            self.acceptance.push(c.clone());
        }
    }
}
