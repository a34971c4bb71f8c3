//! Pass/fail reports produced by the verification routines.

use serde::Serialize;
use serde_json::Value;

/// A single counterexample: the case label and both sides of the failed identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub case: String,
    pub lhs: Value,
    pub rhs: Value,
}

impl Failure {
    pub fn new(case: impl Into<String>, lhs: Value, rhs: Value) -> Self {
        Failure { case: case.into(), lhs, rhs }
    }
}

/// Outcome of one named check over a set of cases.
///
/// At most [`CheckReport::MAX_FAILURES`] counterexamples are stored; `failed`
/// counts all of them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub cases: usize,
    pub failed: usize,
    pub failures: Vec<Failure>,
}

impl CheckReport {
    pub const MAX_FAILURES: usize = 8;

    pub fn new(name: impl Into<String>) -> Self {
        CheckReport { name: name.into(), cases: 0, failed: 0, failures: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    pub fn pass_case(&mut self) {
        self.cases += 1;
    }

    pub fn fail_case(&mut self, failure: Failure) {
        self.cases += 1;
        self.failed += 1;
        if self.failures.len() < Self::MAX_FAILURES {
            self.failures.push(failure);
        }
    }

    /// Records one case: passes when `ok`, otherwise stores the lazily built failure.
    pub fn record(&mut self, ok: bool, failure: impl FnOnce() -> Failure) {
        if ok {
            self.pass_case();
        } else {
            self.fail_case(failure());
        }
    }

    /// Folds another report's cases into this one.
    pub fn absorb(&mut self, other: CheckReport) {
        self.cases += other.cases;
        self.failed += other.failed;
        for f in other.failures {
            if self.failures.len() < Self::MAX_FAILURES {
                self.failures.push(f);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failures_are_capped_but_counted() {
        let mut r = CheckReport::new("t");
        for i in 0..20 {
            r.record(i % 2 == 0, || Failure::new(format!("case {i}"), Value::Null, Value::Null));
        }
        assert_eq!((r.cases, r.failed), (20, 10));
        assert_eq!(r.failures.len(), CheckReport::MAX_FAILURES);
        assert!(!r.passed());
    }
}
