use serde::{Deserialize, Serialize};

use super::grid::GridSpec;

/// One named pass/fail test inside a report. Non-gating checks are recorded
/// but do not affect the report's `pass`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub gating: bool,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub note: String,
}

impl Check {
    /// Passes when `value <= tolerance`.
    pub fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.to_string(),
            value,
            tolerance,
            pass: value <= tolerance,
            gating: true,
            note: String::new(),
        }
    }

    pub fn advisory(mut self) -> Self {
        self.gating = false;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub minimality: f64,
    pub constraint: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignLedger {
    pub printed_sign: String,
    pub printed_form_agrees: bool,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub subject: String,
    pub config: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub grid: Option<GridSpec>,
    pub max_residual: f64,
    pub argmax: Option<[f64; 2]>,
    pub pass: bool,
    pub sigma_branch: Option<f64>,
    pub paper_sign_agrees: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sign_ledger: Option<SignLedger>,
    pub duration_ms: Option<u64>,
    pub evaluated: usize,
    pub skipped: usize,
    pub tolerances: Tolerances,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

impl ResidualReport {
    pub fn new(subject: impl Into<String>, config: impl Into<String>, tolerances: Tolerances) -> Self {
        ResidualReport {
            subject: subject.into(),
            config: config.into(),
            grid: None,
            max_residual: 0.0,
            argmax: None,
            pass: false,
            sigma_branch: None,
            paper_sign_agrees: true,
            sign_ledger: None,
            duration_ms: None,
            evaluated: 0,
            skipped: 0,
            tolerances,
            checks: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Sets `pass` from the gating checks.
    pub fn finish(mut self) -> Self {
        self.pass = self.checks.iter().filter(|c| c.gating).all(|c| c.pass);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Running maximum with ties broken toward the lexicographically smaller point.
#[derive(Debug, Clone, Copy, Default)]
pub struct ArgMax {
    pub value: f64,
    pub at: Option<(f64, f64)>,
}

impl ArgMax {
    pub fn push(&mut self, value: f64, at: (f64, f64)) {
        let value = if value.is_nan() { f64::INFINITY } else { value };
        let better = match self.at {
            None => true,
            Some(p) => value > self.value || (value == self.value && at < p),
        };
        if better {
            self.value = value;
            self.at = Some(at);
        }
    }

    pub fn merge(mut self, other: ArgMax) -> ArgMax {
        if let Some(p) = other.at {
            self.push(other.value, p);
        }
        self
    }
}
