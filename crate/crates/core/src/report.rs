//! Machine-readable suite reports.

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: u32 = 1;
/// Name of the seeded generator used by every suite.
pub const RNG_NAME: &str = "ChaCha8";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    /// The module-level check this row instantiates, e.g. `pairing.orthogonality.dual`.
    pub check_id: String,
    pub inputs: Value,
    pub expected: String,
    pub got: String,
    pub error: Option<f64>,
    pub pass: bool,
}

impl Row {
    pub fn new(
        check_id: &str,
        inputs: Value,
        expected: impl ToString,
        got: impl ToString,
        error: Option<f64>,
        pass: bool,
    ) -> Self {
        Self {
            check_id: check_id.to_string(),
            inputs,
            expected: expected.to_string(),
            got: got.to_string(),
            error,
            pass,
        }
    }

    /// A numeric comparison passing when `error <= tol`.
    pub fn within(
        check_id: &str,
        inputs: Value,
        expected: impl ToString,
        got: impl ToString,
        error: f64,
        tol: f64,
    ) -> Self {
        Self::new(check_id, inputs, expected, got, Some(error), error <= tol)
    }

    /// An exact comparison.
    pub fn exact(check_id: &str, inputs: Value, expected: impl ToString, got: impl ToString) -> Self {
        let (e, g) = (expected.to_string(), got.to_string());
        let pass = e == g;
        Self::new(check_id, inputs, e, g, None, pass)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationInfo {
    pub orientation_sign: f64,
    pub constant: f64,
    pub fitted_re: f64,
    pub fitted_im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub suite: String,
    pub tool_version: String,
    pub rng: String,
    pub seed: u64,
    pub config: Value,
    pub calibration: Option<CalibrationInfo>,
    /// Suite-specific structured output.
    pub details: Value,
    pub notes: Vec<String>,
    pub summary: Summary,
    pub pass: bool,
    pub rows: Vec<Row>,
}

impl Report {
    pub fn new(suite: &str, seed: u64, config: Value) -> Self {
        Self {
            schema: SCHEMA,
            suite: suite.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            rng: RNG_NAME.to_string(),
            seed,
            config,
            calibration: None,
            details: Value::Null,
            notes: Vec::new(),
            summary: Summary::default(),
            pass: true,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn extend(&mut self, rows: impl IntoIterator<Item = Row>) {
        self.rows.extend(rows);
    }

    /// Sorts rows by `(check_id, inputs)` and fills the summary.
    pub fn finish(mut self) -> Self {
        let mut keyed: Vec<(String, String, Row)> =
            self.rows.drain(..).map(|r| (r.check_id.clone(), r.inputs.to_string(), r)).collect();
        keyed.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
        self.rows = keyed.into_iter().map(|(_, _, r)| r).collect();
        let passed = self.rows.iter().filter(|r| r.pass).count();
        self.summary = Summary { total: self.rows.len(), passed, failed: self.rows.len() - passed };
        self.pass = self.summary.failed == 0;
        self
    }

    pub fn rows_with_prefix<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows.iter().filter(move |r| r.check_id.starts_with(prefix))
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// One line per row plus a summary, for terminals.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            out.push_str(&format!(
                "[{}] {} {} expected={} got={}{}\n",
                if r.pass { "ok" } else { "FAIL" },
                r.check_id,
                r.inputs,
                r.expected,
                r.got,
                r.error.map(|e| format!(" err={e:.3e}")).unwrap_or_default()
            ));
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out.push_str(&format!(
            "{}: {} rows, {} passed, {} failed => {}\n",
            self.suite,
            self.summary.total,
            self.summary.passed,
            self.summary.failed,
            if self.pass { "PASS" } else { "FAIL" }
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn finish_sorts_and_counts() {
        let mut r = Report::new("demo", 1, json!({}));
        r.push(Row::within("b.check", json!({"x": 2}), "1", "1.1", 0.1, 0.01));
        r.push(Row::exact("a.check", json!({"x": 1}), "1/2", "1/2"));
        r.push(Row::within("b.check", json!({"x": 1}), "1", "1", 0.0, 0.01));
        let r = r.finish();
        let ids: Vec<_> = r.rows.iter().map(|x| (x.check_id.as_str(), x.inputs.to_string())).collect();
        assert_eq!(ids[0].0, "a.check");
        assert_eq!(ids[1].1, r#"{"x":1}"#);
        assert_eq!(r.summary, Summary { total: 3, passed: 2, failed: 1 });
        assert!(!r.pass);
        assert!(r.to_json().contains("\"schema\": 1"));
        assert!(r.to_text().contains("=> FAIL"));
    }
}
