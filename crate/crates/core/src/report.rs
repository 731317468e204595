//! Check rows, reports, and their byte-stable JSON/CSV encodings.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// One checked inequality `lhs ≤ rhs`, with `slack = rhs - lhs`.
///
/// Equalities are encoded as `|a - b| ≤ 0` and violation counts as
/// `count ≤ 0`.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRow {
    pub check: String,
    pub instance: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl CheckRow {
    pub fn leq(
        check: impl Into<String>,
        instance: impl Into<String>,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
    ) -> Self {
        let slack = rhs - lhs;
        // NaN slack fails
        let verdict = if slack >= -tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        CheckRow {
            check: check.into(),
            instance: instance.into(),
            lhs,
            rhs,
            slack,
            tolerance,
            verdict,
        }
    }

    pub fn eq(
        check: impl Into<String>,
        instance: impl Into<String>,
        a: f64,
        b: f64,
        tolerance: f64,
    ) -> Self {
        CheckRow::leq(check, instance, (a - b).abs(), 0.0, tolerance)
    }

    pub fn count(check: impl Into<String>, instance: impl Into<String>, violations: usize) -> Self {
        CheckRow::leq(check, instance, violations as f64, 0.0, 0.0)
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CheckReport {
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub seed: u64,
    pub system: String,
    pub budget: String,
    pub rows: Vec<CheckRow>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(command: impl Into<String>) -> Self {
        CheckReport {
            command: command.into(),
            ..Default::default()
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.params.insert(key.to_string(), v);
        self
    }

    pub fn push(&mut self, row: CheckRow) {
        self.rows.push(row);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Appends the rows and notes of `other`, prefixing its check ids.
    pub fn absorb(&mut self, prefix: &str, other: CheckReport) {
        for mut row in other.rows {
            row.check = format!("{prefix}/{}", row.check);
            self.rows.push(row);
        }
        self.notes.extend(other.notes);
    }

    pub fn passed(&self) -> bool {
        self.rows.iter().all(CheckRow::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| !r.passed())
    }

    /// Rows whose check id equals `check` or starts with `check/`.
    pub fn rows_for<'a>(&'a self, check: &'a str) -> impl Iterator<Item = &'a CheckRow> + 'a {
        self.rows.iter().filter(move |r| {
            r.check == check || r.check.strip_suffix(check).is_some_and(|p| p.ends_with('/'))
        })
    }

    /// Minimum slack over all rows (infinite for an empty report).
    pub fn min_slack(&self) -> f64 {
        self.rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min)
    }

    pub fn sort(&mut self) {
        self.rows
            .sort_by(|a, b| (&a.check, &a.instance).cmp(&(&b.check, &b.instance)));
    }

    /// JSON with sorted keys and every float rounded to 15 significant
    /// digits.
    pub fn to_json(&self) -> String {
        let mut sorted = self.clone();
        sorted.sort();
        let mut value = serde_json::to_value(&sorted).expect("report serializes");
        if let Value::Object(map) = &mut value {
            map.insert(
                "summary".to_string(),
                Value::String(if self.passed() { "pass" } else { "fail" }.to_string()),
            );
        }
        round_floats(&mut value);
        let mut s = serde_json::to_string_pretty(&value).expect("value serializes");
        s.push('\n');
        s
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

/// Rounds to 15 significant digits; the shortest round-trip form of the
/// result is what gets printed.
pub fn round15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                if let Some(x) = n.as_f64() {
                    if let Some(r) = serde_json::Number::from_f64(round15(x)) {
                        *n = r;
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Writes records through the `csv` crate into a string.
pub fn to_csv<T: Serialize>(records: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| crate::Error::Input(format!("csv flush: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts_follow_slack() {
        assert!(CheckRow::leq("a", "x", 1.0, 1.0 - 1e-12, 1e-9).passed());
        assert!(!CheckRow::leq("a", "x", 1.0, 0.5, 1e-9).passed());
        assert!(!CheckRow::leq("a", "x", f64::NAN, 0.5, 1e-9).passed());
        assert!(CheckRow::count("a", "x", 0).passed());
        assert!(!CheckRow::count("a", "x", 2).passed());
    }

    #[test]
    fn json_is_sorted_and_rounded() {
        let mut r = CheckReport::new("t");
        r.push(CheckRow::leq("b", "2", 0.1 + 0.2, 1.0, 0.0));
        r.push(CheckRow::leq("a", "1", 1.0 / 3.0, 1.0, 0.0));
        let s = r.to_json();
        assert!(s.find("\"check\": \"a\"").unwrap() < s.find("\"check\": \"b\"").unwrap());
        assert!(s.contains("0.3,") || s.contains("0.3\n"), "{s}");
        assert!(s.contains("0.333333333333333"));
        assert!(s.contains("\"summary\": \"pass\""));
        assert_eq!(s, r.to_json());
    }

    #[test]
    fn failed_row_serializes_negative_slack() {
        let mut r = CheckReport::new("t");
        r.push(CheckRow::leq("c", "i", 2.0, 1.0, 0.0));
        let s = r.to_json();
        assert!(s.contains("\"verdict\": \"fail\""));
        assert!(s.contains("\"slack\": -1.0"));
    }
}
