//! Flat label → number/bool reports, serialized to JSON.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{Map, Number, Value};

use crate::error::Result;
use crate::field::GridSpec;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Named numeric results and pass/fail flags of one analysis.
///
/// Labels are stable API. Wall time is the only field that may differ
/// between runs with identical inputs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AnalysisReport {
    pub command: String,
    pub grid: Option<GridSpec>,
    values: BTreeMap<String, f64>,
    flags: BTreeMap<String, bool>,
    pub wall_time: Option<f64>,
}

impl AnalysisReport {
    pub fn new(command: impl Into<String>) -> Self {
        AnalysisReport {
            command: command.into(),
            ..Default::default()
        }
    }

    pub fn with_grid(mut self, grid: GridSpec) -> Self {
        self.grid = Some(grid);
        self
    }

    pub fn value(&mut self, label: impl Into<String>, v: f64) -> &mut Self {
        self.values.insert(label.into(), v);
        self
    }

    pub fn flag(&mut self, label: impl Into<String>, ok: bool) -> &mut Self {
        self.flags.insert(label.into(), ok);
        self
    }

    /// Records `lhs ≤ rhs` as `<label>.lhs`, `<label>.rhs`, `<label>.margin` and a flag.
    pub fn bound(&mut self, label: &str, lhs: f64, rhs: f64) -> &mut Self {
        self.value(format!("{label}.lhs"), lhs);
        self.value(format!("{label}.rhs"), rhs);
        self.value(format!("{label}.margin"), rhs - lhs);
        self.flag(format!("{label}.pass"), lhs <= rhs)
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.values.get(label).copied()
    }

    pub fn get_flag(&self, label: &str) -> Option<bool> {
        self.flags.get(label).copied()
    }

    pub fn values(&self) -> &BTreeMap<String, f64> {
        &self.values
    }

    pub fn flags(&self) -> &BTreeMap<String, bool> {
        &self.flags
    }

    /// True when every recorded flag holds (vacuously true without flags).
    pub fn passed(&self) -> bool {
        self.flags.values().all(|&b| b)
    }

    pub fn failed_flags(&self) -> Vec<&str> {
        self.flags
            .iter()
            .filter(|(_, &ok)| !ok)
            .map(|(k, _)| k.as_str())
            .collect()
    }

    /// Copies another report's entries under `prefix.`.
    pub fn absorb(&mut self, prefix: &str, other: &AnalysisReport) -> &mut Self {
        for (k, v) in &other.values {
            self.values.insert(format!("{prefix}.{k}"), *v);
        }
        for (k, v) in &other.flags {
            self.flags.insert(format!("{prefix}.{k}"), *v);
        }
        self
    }

    /// Flat JSON object. Non-finite numbers become `null`.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("tool_version".into(), Value::String(TOOL_VERSION.into()));
        map.insert("command".into(), Value::String(self.command.clone()));
        if let Some(g) = self.grid {
            map.insert("grid.resolution".into(), Value::from(g.resolution()));
            map.insert("grid.truncation".into(), Value::from(g.truncation()));
        }
        for (k, v) in &self.values {
            map.insert(
                k.clone(),
                Number::from_f64(*v)
                    .map(Value::Number)
                    .unwrap_or(Value::Null),
            );
        }
        for (k, v) in &self.flags {
            map.insert(k.clone(), Value::Bool(*v));
        }
        map.insert("pass".into(), Value::Bool(self.passed()));
        if let Some(t) = self.wall_time {
            map.insert(
                "wall_time_s".into(),
                Number::from_f64(t)
                    .map(Value::Number)
                    .unwrap_or(Value::Null),
            );
        }
        Value::Object(map)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("report serializes") + "\n"
    }

    /// Writes the JSON atomically.
    pub fn write_json(&self, path: &Path) -> Result<()> {
        crate::io::write_atomic(path, self.to_json_string().as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_json_with_bounds() {
        let mut r = AnalysisReport::new("zak").with_grid(GridSpec::new(4, 1).unwrap());
        r.value("A_est", 1.0)
            .bound("lemma", 0.5, 1.0)
            .value("nan", f64::NAN);
        let j = r.to_json();
        assert_eq!(j["A_est"], 1.0);
        assert_eq!(j["lemma.margin"], 0.5);
        assert_eq!(j["lemma.pass"], true);
        assert_eq!(j["grid.truncation"], 1);
        assert!(j["nan"].is_null());
        assert!(r.passed());
        r.flag("broken", false);
        assert_eq!(r.failed_flags(), vec!["broken"]);
    }
}
