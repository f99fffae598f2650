//! The report every command prints.

use std::fmt::Write as _;

use rickart_core::CheckRecord;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub status: &'static str,
}

impl Summary {
    pub fn of(checks: &[CheckRecord]) -> Self {
        let failed = checks.iter().filter(|c| !c.pass).count();
        Self {
            passed: checks.len() - failed,
            failed,
            status: if failed == 0 { "pass" } else { "fail" },
        }
    }
}

/// Serializes deterministically for fixed inputs and seed: struct fields
/// keep declaration order, maps are sorted, and the wall time is only
/// present when requested.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub results: Value,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

impl RunReport {
    pub fn new(command: &str, digest: String, seed: Option<u64>, results: Value, checks: Vec<CheckRecord>) -> Self {
        Self {
            command: command.into(),
            inputs_digest: digest,
            seed,
            results,
            summary: Summary::of(&checks),
            checks,
            wall_time_seconds: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command: {}", self.command);
        let _ = writeln!(s, "inputs:  sha256 {}", self.inputs_digest);
        if let Some(seed) = self.seed {
            let _ = writeln!(s, "seed:    {seed}");
        }
        if !self.checks.is_empty() {
            let _ = writeln!(s, "checks:");
            for c in &self.checks {
                let mark = if c.pass { "PASS" } else { "FAIL" };
                let _ = writeln!(s, "  {mark} {}: {}", c.name, c.detail);
            }
        }
        if !self.results.is_null() {
            let body = serde_json::to_string_pretty(&self.results).expect("results serialize");
            let _ = writeln!(s, "results:");
            for line in body.lines() {
                let _ = writeln!(s, "  {line}");
            }
        }
        let _ = write!(
            s,
            "summary: {} ({} passed, {} failed)",
            self.summary.status, self.summary.passed, self.summary.failed
        );
        if let Some(t) = self.wall_time_seconds {
            let _ = write!(s, "\nwall time: {t:.3} s");
        }
        s
    }
}

/// SHA-256 over labelled inputs: each part is its label, a NUL, its
/// length in bytes, a NUL, and its bytes.
#[derive(Default)]
pub struct InputsDigest {
    hasher: Sha256,
}

impl InputsDigest {
    pub fn part(&mut self, label: &str, bytes: &[u8]) -> &mut Self {
        self.hasher.update(label.as_bytes());
        self.hasher.update([0]);
        self.hasher.update(bytes.len().to_string().as_bytes());
        self.hasher.update([0]);
        self.hasher.update(bytes);
        self
    }

    pub fn finish(self) -> String {
        hex::encode(self.hasher.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_counts() {
        let checks = vec![CheckRecord::pass("a", ""), CheckRecord::fail("b", "x", Vec::new())];
        assert_eq!(
            Summary::of(&checks),
            Summary {
                passed: 1,
                failed: 1,
                status: "fail"
            }
        );
    }

    #[test]
    fn digest_separates_parts() {
        let d = |parts: &[(&str, &[u8])]| {
            let mut h = InputsDigest::default();
            for (l, b) in parts {
                h.part(l, b);
            }
            h.finish()
        };
        assert_ne!(d(&[("a", b"xy")]), d(&[("a", b"x"), ("", b"y")]));
        assert_eq!(d(&[("a", b"xy")]), d(&[("a", b"xy")]));
        assert_eq!(d(&[]).len(), 64);
    }

    #[test]
    fn wall_time_only_when_set() {
        let mut r = RunReport::new("norm", "00".into(), None, Value::Null, Vec::new());
        assert!(!r.to_json().contains("wall_time"));
        r.wall_time_seconds = Some(0.5);
        assert!(r.to_json().contains("\"wall_time_seconds\":0.5"));
    }
}
