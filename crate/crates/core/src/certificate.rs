//! Residual checks attached to factorization results.

use std::fmt;

/// One measured invariant of a factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub deviation: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn new(name: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            deviation,
            tolerance,
        }
    }

    /// NaN deviations fail.
    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

/// Anything that can re-measure its own invariants from the stored factors.
pub trait Certified {
    /// Short name used as the report title.
    fn kind(&self) -> &'static str;

    fn checks(&self) -> Vec<Check>;
}

/// Table of checks with pass/fail status.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub kind: String,
    pub checks: Vec<Check>,
}

impl ResidualReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// One `key=value` pair per line.
    pub fn to_machine(&self) -> String {
        let mut out = format!("kind={}\n", self.kind);
        for c in &self.checks {
            out.push_str(&format!(
                "{}.deviation={:.2e}\n{}.tolerance={:.2e}\n{}.status={}\n",
                c.name,
                c.deviation,
                c.name,
                c.tolerance,
                c.name,
                status(c)
            ));
        }
        out.push_str(&format!("passed={}\n", self.all_passed()));
        out
    }
}

fn status(c: &Check) -> &'static str {
    if c.passed() {
        "pass"
    } else {
        "fail"
    }
}

impl fmt::Display for ResidualReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        writeln!(f, "{}", self.kind)?;
        writeln!(f, "  {:<width$}  {:>10}  {:>10}  status", "check", "deviation", "tolerance")?;
        for c in &self.checks {
            writeln!(
                f,
                "  {:<width$}  {:>10.2e}  {:>10.2e}  {}",
                c.name,
                c.deviation,
                c.tolerance,
                status(c)
            )?;
        }
        Ok(())
    }
}

/// Builds the pass/fail table for any certified result.
pub fn residual_report(result: &dyn Certified) -> ResidualReport {
    ResidualReport {
        kind: result.kind().to_string(),
        checks: result.checks(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Fake(f64);

    impl Certified for Fake {
        fn kind(&self) -> &'static str {
            "fake"
        }
        fn checks(&self) -> Vec<Check> {
            vec![Check::new("a", self.0, 1e-10), Check::new("b", 0.0, 1e-10)]
        }
    }

    #[test]
    fn pass_and_fail_rows() {
        let ok = residual_report(&Fake(1e-12));
        assert!(ok.all_passed());
        assert!(ok.to_string().contains("pass"));
        let bad = residual_report(&Fake(0.5));
        assert!(!bad.all_passed());
        let line = bad.to_string().lines().find(|l| l.trim_start().starts_with("a ")).unwrap().to_string();
        assert!(line.contains("fail") && line.contains("5.00e-1"));
        assert!(bad.to_machine().contains("a.status=fail"));
    }

    #[test]
    fn nan_fails() {
        assert!(!Check::new("x", f64::NAN, 1.0).passed());
    }
}
