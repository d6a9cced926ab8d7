//! Versioned JSON verification reports.

use std::collections::BTreeSet;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use ramanujan_core::gauss_manin::builtin::PRINTED_CONNECTIONS;

pub const SCHEMA_VERSION: u32 = 1;

pub const SUBCOMMANDS: [&str; 7] =
    ["verify-qseries", "symplectic-selftest", "rederive-connection", "solve-field", "formal-check", "flow", "all"];

#[derive(Serialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Serialize, Clone, Debug)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Serialize, Clone, Debug)]
pub struct Versions {
    pub artifact: String,
    pub printed_connections_sha256: String,
}

impl Versions {
    pub fn current() -> Self {
        Versions {
            artifact: env!("CARGO_PKG_VERSION").to_string(),
            printed_connections_sha256: hex::encode(Sha256::digest(PRINTED_CONNECTIONS.as_bytes())),
        }
    }
}

#[derive(Serialize, Clone, Debug)]
pub struct Report {
    pub schema_version: u32,
    pub subcommand: String,
    pub inputs: Value,
    pub checks: Vec<Check>,
    pub data: Value,
    pub versions: Versions,
    /// Human-readable lines for stderr; not part of the JSON.
    #[serde(skip)]
    pub summary: Vec<String>,
}

impl Report {
    pub fn new(subcommand: &str, inputs: Value) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            subcommand: subcommand.to_string(),
            inputs,
            checks: Vec::new(),
            data: Value::Null,
            versions: Versions::current(),
            summary: Vec::new(),
        }
    }

    pub fn check(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) -> bool {
        let status = if ok { Status::Pass } else { Status::Fail };
        self.checks.push(Check { name: name.into(), status, detail: detail.into() });
        ok
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.summary.push(line.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    /// Structural checks run before a report is emitted.
    pub fn validate(&self) -> Result<(), String> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(format!("schema version {} (expected {SCHEMA_VERSION})", self.schema_version));
        }
        if !SUBCOMMANDS.contains(&self.subcommand.as_str()) {
            return Err(format!("unknown subcommand `{}`", self.subcommand));
        }
        if !self.inputs.is_object() {
            return Err("inputs must be an object".into());
        }
        if self.checks.is_empty() {
            return Err("report has no checks".into());
        }
        let mut seen = BTreeSet::new();
        for c in &self.checks {
            if c.name.is_empty() {
                return Err("check with an empty name".into());
            }
            if !seen.insert(c.name.as_str()) {
                return Err(format!("duplicate check `{}`", c.name));
            }
        }
        if self.versions.printed_connections_sha256.len() != 64 {
            return Err("malformed data-file hash".into());
        }
        Ok(())
    }

    pub fn to_json(&self, compact: bool) -> String {
        let s = if compact { serde_json::to_string(self) } else { serde_json::to_string_pretty(self) };
        s.expect("reports serialize")
    }

    /// Lines for stderr: one per check, then the free-form notes.
    pub fn human(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
            };
            if c.detail.is_empty() {
                out.push_str(&format!("{tag}  {}\n", c.name));
            } else {
                out.push_str(&format!("{tag}  {}: {}\n", c.name, c.detail));
            }
        }
        for line in &self.summary {
            out.push_str(line);
            out.push('\n');
        }
        let failed = self.checks.iter().filter(|c| c.status == Status::Fail).count();
        out.push_str(&format!("{}: {} checks, {failed} failed\n", self.subcommand, self.checks.len()));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn validation_rejects_malformed_reports() {
        let mut r = Report::new("flow", json!({}));
        assert!(r.validate().is_err());
        r.check("a", true, "");
        assert!(r.validate().is_ok());
        r.check("a", false, "");
        assert!(r.validate().unwrap_err().contains("duplicate"));
        let mut r = Report::new("nope", json!({}));
        r.check("a", true, "");
        assert!(r.validate().is_err());
    }

    #[test]
    fn status_serializes_lowercase() {
        let mut r = Report::new("flow", json!({}));
        r.check("x", false, "d");
        let v: Value = serde_json::from_str(&r.to_json(true)).unwrap();
        assert_eq!(v["checks"][0]["status"], "fail");
        assert_eq!(v["schema_version"], 1);
        assert!(v.get("summary").is_none());
        assert!(!r.passed());
    }
}
