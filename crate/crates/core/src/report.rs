//! Structured pass/fail records.

use serde::{Deserialize, Serialize};

use crate::document::ElementDocument;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub witness: Vec<ElementDocument>,
    pub detail: String,
}

impl CheckRecord {
    pub fn pass(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass: true,
            witness: Vec::new(),
            detail: detail.into(),
        }
    }

    pub fn fail(name: impl Into<String>, detail: impl Into<String>, witness: Vec<ElementDocument>) -> Self {
        Self {
            name: name.into(),
            pass: false,
            witness,
            detail: detail.into(),
        }
    }
}

/// Outcome of an audit: one record per named check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub checks: Vec<CheckRecord>,
    pub seed: u64,
    pub sample_count: usize,
}

impl AxiomReport {
    pub fn new(seed: u64, sample_count: usize) -> Self {
        Self {
            checks: Vec::new(),
            seed,
            sample_count,
        }
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.checks.push(record);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Merges another report's checks. The result is sorted by
    /// (name, detail) so merge order does not matter.
    pub fn merge(mut self, other: AxiomReport) -> AxiomReport {
        self.checks.extend(other.checks);
        self.sample_count = self.sample_count.max(other.sample_count);
        self.checks
            .sort_by(|a, b| a.name.cmp(&b.name).then_with(|| a.detail.cmp(&b.detail)));
        self
    }
}
