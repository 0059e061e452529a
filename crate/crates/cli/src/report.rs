//! JSON report document.
//!
//! Key order is fixed by struct field order and `BTreeMap`, so two runs with
//! the same config and seed serialize to identical bytes. No timestamps are
//! recorded.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::config::ExperimentConfig;

pub const SCHEMA: &str = "qcorr-report/1";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub name: String,
    pub passed: bool,
    /// Measured quantity the verdict is based on, if there is a single one.
    pub value: Option<f64>,
    pub threshold: Option<f64>,
    pub detail: String,
}

impl Check {
    pub fn new(id: impl Into<String>, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            name: name.into(),
            passed,
            value: None,
            threshold: None,
            detail: detail.into(),
        }
    }

    /// Passes when `value <= threshold`.
    pub fn at_most(id: impl Into<String>, name: impl Into<String>, value: f64, threshold: f64, what: &str) -> Self {
        let passed = value <= threshold;
        Self {
            id: id.into(),
            name: name.into(),
            passed,
            value: Some(value),
            threshold: Some(threshold),
            detail: format!("{what} = {value:e} (limit {threshold:e})"),
        }
    }

    /// Passes when `value > threshold`.
    pub fn above(id: impl Into<String>, name: impl Into<String>, value: f64, threshold: f64, what: &str) -> Self {
        let passed = value > threshold;
        Self {
            id: id.into(),
            name: name.into(),
            passed,
            value: Some(value),
            threshold: Some(threshold),
            detail: format!("{what} = {value} (must exceed {threshold})"),
        }
    }

    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        format!("{verdict} [{}] {}: {}", self.id, self.name, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub failed_checks: Vec<String>,
    pub all_passed: bool,
}

impl Summary {
    fn of(checks: &[Check]) -> Self {
        let failed_checks: Vec<String> = checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.id.clone())
            .collect();
        Self {
            total: checks.len(),
            passed: checks.len() - failed_checks.len(),
            failed: failed_checks.len(),
            all_passed: failed_checks.is_empty(),
            failed_checks,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub artifact_version: &'static str,
    pub command: String,
    pub config: ExperimentConfig,
    pub results: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub summary: Summary,
}

impl Report {
    pub fn new(command: impl Into<String>, config: ExperimentConfig) -> Self {
        Self {
            schema: SCHEMA,
            artifact_version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            config,
            results: BTreeMap::new(),
            checks: Vec::new(),
            summary: Summary::of(&[]),
        }
    }

    pub fn block<T: Serialize>(&mut self, name: &str, value: &T) {
        let value = serde_json::to_value(value).expect("report blocks serialize");
        self.results.insert(name.to_string(), value);
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
        self.summary = Summary::of(&self.checks);
    }

    pub fn passed(&self) -> bool {
        self.summary.all_passed
    }

    pub fn find(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_tracks_checks() {
        let mut r = Report::new("x", ExperimentConfig::default());
        assert!(r.passed());
        r.check(Check::at_most("1", "small", 0.5, 1.0, "v"));
        r.check(Check::above("2", "big", 0.5, 1.0, "v"));
        assert_eq!(r.summary.total, 2);
        assert_eq!(r.summary.failed_checks, vec!["2".to_string()]);
        assert!(!r.passed());
        assert!(r.find("1").unwrap().line().starts_with("PASS [1] small"));
    }

    #[test]
    fn keys_keep_declared_order() {
        let r = Report::new("x", ExperimentConfig::default());
        let json = r.to_json();
        let order: Vec<usize> = ["\"schema\"", "\"artifact_version\"", "\"command\"", "\"config\"", "\"results\"", "\"checks\"", "\"summary\""]
            .iter()
            .map(|k| json.find(k).unwrap())
            .collect();
        assert!(order.windows(2).all(|w| w[0] < w[1]));
    }
}
