use std::fmt::Write as _;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Na,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Na => "NA",
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// One certified quantity: what was measured, against what, and the verdict.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    pub detail: String,
}

impl Check {
    /// PASS iff `value <= threshold`.
    pub fn at_most(name: &str, value: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: Status::from_bool(value <= threshold),
            value: Some(value),
            threshold: Some(threshold),
            detail: detail.into(),
        }
    }

    /// PASS iff `value >= threshold`.
    pub fn at_least(name: &str, value: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Self {
            status: Status::from_bool(value >= threshold),
            ..Self::at_most(name, value, threshold, detail)
        }
    }

    pub fn flag(name: &str, ok: bool, value: Option<f64>, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: Status::from_bool(ok),
            value,
            threshold: None,
            detail: detail.into(),
        }
    }

    pub fn na(name: &str, why: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: Status::Na,
            value: None,
            threshold: None,
            detail: why.into(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Report {
    /// Free-form header lines (scenario, parameters, warnings).
    pub notes: Vec<String>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub halt: Option<String>,
}

impl Report {
    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for n in &self.notes {
            let _ = writeln!(out, "# {n}");
        }
        for c in &self.checks {
            let _ = write!(out, "{:<4}  {}", c.status.label(), c.name);
            if let Some(v) = c.value {
                let _ = write!(out, " = {v:.6e}");
            }
            if let Some(t) = c.threshold {
                let _ = write!(out, " (threshold {t:.1e})");
            }
            if !c.detail.is_empty() {
                let _ = write!(out, ": {}", c.detail);
            }
            out.push('\n');
        }
        if let Some(h) = &self.halt {
            let _ = writeln!(out, "HALT  {h}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendering() {
        let mut r = Report::default();
        r.note("kind simulate");
        r.push(Check::at_most("virial identity residual", 1e-9, 1e-6, ""));
        r.push(Check::at_least("virial lower bound margin", -1e-3, -1e-6, "min over samples"));
        r.push(Check::na("slope growth envelope", "stable stratification"));
        let text = r.render();
        assert!(text.contains("PASS  virial identity residual = 1.000000e-9 (threshold 1.0e-6)"));
        assert!(text.contains("FAIL  virial lower bound margin"));
        assert!(text.contains("NA    slope growth envelope: stable stratification"));
        assert!(r.failed());
    }
}
