//! Machine-readable check records.

use std::collections::BTreeMap;
use std::time::Duration;

use serde::Serialize;

/// One judged check. `asserted` checks decide the exit status; the others are
/// informational.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub inputs_digest: String,
    pub values: BTreeMap<String, f64>,
    pub tolerance: f64,
    pub passed: bool,
    pub asserted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, inputs_digest: &str, tolerance: f64) -> Self {
        CheckRecord {
            name: name.into(),
            inputs_digest: inputs_digest.to_owned(),
            values: BTreeMap::new(),
            tolerance,
            passed: false,
            asserted: true,
            note: None,
            wall_time_ms: None,
        }
    }

    pub fn value(mut self, key: &str, v: f64) -> Self {
        self.values.insert(key.to_owned(), v);
        self
    }

    pub fn passed(mut self, passed: bool) -> Self {
        self.passed = passed;
        self
    }

    pub fn asserted(mut self, asserted: bool) -> Self {
        self.asserted = asserted;
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn timed(mut self, elapsed: Duration) -> Self {
        self.wall_time_ms = Some(elapsed.as_secs_f64() * 1e3);
        self
    }

    /// True for asserted checks that did not pass.
    pub fn is_failure(&self) -> bool {
        self.asserted && !self.passed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub inputs_digest: String,
    pub checks: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn new(inputs_digest: &str) -> Self {
        VerificationReport {
            schema: 1,
            inputs_digest: inputs_digest.to_owned(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.checks.push(record);
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| c.is_failure())
    }

    pub fn all_asserted_passed(&self) -> bool {
        self.failures().next().is_none()
    }

    /// Drops wall-clock times so repeated runs serialize identically.
    pub fn without_timings(mut self) -> Self {
        for c in &mut self.checks {
            c.wall_time_ms = None;
        }
        self
    }
}
