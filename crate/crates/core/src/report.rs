//! Named verification checks and the report they aggregate into.
//!
//! Every check carries a stable id, a human-readable anchor naming the
//! identity it tests, the numeric residual, the tolerance in force and the
//! verdict. Reports serialize to the versioned `qgl-report-1` JSON schema.

use serde::{Deserialize, Serialize};

pub const REPORT_SCHEMA: &str = "qgl-report-1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub anchor: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

impl Check {
    pub fn residual(id: &str, anchor: &str, residual: f64, tolerance: f64) -> Self {
        Check {
            id: id.to_string(),
            anchor: anchor.to_string(),
            residual,
            tolerance,
            pass: residual.is_finite() && residual <= tolerance,
            detail: None,
        }
    }

    /// A check that failed structurally (no finite residual to report).
    pub fn failed(id: &str, anchor: &str, tolerance: f64, detail: String) -> Self {
        Check {
            id: id.to_string(),
            anchor: anchor.to_string(),
            residual: f64::INFINITY,
            tolerance,
            pass: false,
            detail: Some(detail),
        }
    }

    pub fn with_detail(mut self, detail: String) -> Self {
        self.detail = Some(detail);
        self
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: String,
    pub checks: Vec<Check>,
    pub verdict: bool,
}

impl VerificationReport {
    pub fn from_checks(checks: Vec<Check>) -> Self {
        let verdict = checks.iter().all(|c| c.pass);
        VerificationReport {
            schema: REPORT_SCHEMA.to_string(),
            checks,
            verdict,
        }
    }

    pub fn find(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn failing(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    /// Plain-text rendering; the JSON form is canonical.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!(
                "{verdict}  {:<36} residual {:>12.3e}  tol {:>8.1e}  [{}]\n",
                c.id, c.residual, c.tolerance, c.anchor
            ));
            if let Some(d) = &c.detail {
                out.push_str(&format!("      {d}\n"));
            }
        }
        out.push_str(&format!(
            "verdict: {}\n",
            if self.verdict { "PASS" } else { "FAIL" }
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_iff_all_pass() {
        let good = Check::residual("a", "x", 1e-12, 1e-9);
        let bad = Check::residual("b", "y", 1e-3, 1e-9);
        assert!(VerificationReport::from_checks(vec![good.clone()]).verdict);
        assert!(!VerificationReport::from_checks(vec![good, bad]).verdict);
    }

    #[test]
    fn schema_round_trip() {
        let rep = VerificationReport::from_checks(vec![Check::residual("a", "x", 0.0, 1e-9)]);
        let json = rep.to_json();
        let back: VerificationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.schema, REPORT_SCHEMA);
        assert!(back.verdict);
    }
}
