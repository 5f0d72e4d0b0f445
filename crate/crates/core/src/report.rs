//! Machine-readable verdict reports.

use serde::Serialize;

/// One verified condition.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    /// The condition being verified, stated as a formula.
    pub anchor: String,
    pub passed: bool,
    /// Advisory checks are reported but do not affect the verdict.
    pub advisory: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, anchor: &str, passed: bool, detail: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            anchor: anchor.into(),
            passed,
            advisory: false,
            detail: detail.into(),
        }
    }

    pub fn advisory(name: &str, anchor: &str, passed: bool, detail: impl Into<String>) -> Check {
        Check {
            advisory: true,
            ..Check::new(name, anchor, passed, detail)
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
    pub verdict: bool,
    pub summary: String,
}

impl Report {
    /// Verdict is the conjunction of the non-advisory checks.
    pub fn from_checks(checks: Vec<Check>) -> Report {
        let verdict = checks.iter().filter(|c| !c.advisory).all(|c| c.passed);
        let summary = summarize(&checks, verdict);
        Report {
            checks,
            verdict,
            summary,
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn passed(&self, name: &str) -> bool {
        self.check(name).is_some_and(|c| c.passed)
    }
}

fn summarize(checks: &[Check], verdict: bool) -> String {
    let mut out = String::from(if verdict { "PASS" } else { "FAIL" });
    for c in checks {
        let status = match (c.passed, c.advisory) {
            (true, _) => "ok",
            (false, false) => "FAILED",
            (false, true) => "not confirmed",
        };
        out.push_str(&format!("\n  [{status}] {}: {}", c.name, c.anchor));
        if c.advisory {
            out.push_str(" (advisory)");
        }
    }
    out
}
