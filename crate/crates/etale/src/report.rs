//! Structured check results and machine-readable reports.
//!
//! A report is a list of named checks with pass/fail/skip status and a
//! structured witness on failure. Reports serialize to stable JSON; the
//! digest excludes timing fields so identical inputs and seeds produce
//! identical digests across runs.

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize, PartialEq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Check {
        Check { name: name.into(), status: CheckStatus::Pass, witness: None }
    }

    pub fn fail(name: impl Into<String>, witness: serde_json::Value) -> Check {
        Check { name: name.into(), status: CheckStatus::Fail, witness: Some(witness) }
    }

    pub fn skipped(name: impl Into<String>, reason: impl Into<String>) -> Check {
        Check { name: name.into(), status: CheckStatus::Skipped(reason.into()), witness: None }
    }

    pub fn of(name: impl Into<String>, ok: bool, witness: Option<serde_json::Value>) -> Check {
        if ok {
            Check::pass(name)
        } else {
            Check { name: name.into(), status: CheckStatus::Fail, witness }
        }
    }

    pub fn passed(&self) -> bool {
        matches!(self.status, CheckStatus::Pass)
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed())
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub instance: String,
    pub checks: Vec<Check>,
    /// Milliseconds, excluded from the digest.
    pub elapsed_ms: u128,
    pub digest: String,
}

impl Report {
    pub fn new(instance: impl Into<String>, checks: Vec<Check>, elapsed_ms: u128) -> Report {
        let instance = instance.into();
        let digest = digest_of(&instance, &checks);
        Report { instance, checks, elapsed_ms, digest }
    }

    pub fn passed(&self) -> bool {
        all_pass(&self.checks)
    }

    pub fn n_failed(&self) -> usize {
        self.checks.iter().filter(|c| matches!(c.status, CheckStatus::Fail)).count()
    }
}

fn digest_of(instance: &str, checks: &[Check]) -> String {
    #[derive(Serialize)]
    struct Stable<'a> {
        instance: &'a str,
        checks: &'a [Check],
    }
    let body = serde_json::to_vec(&Stable { instance, checks }).expect("serializable");
    hex::encode(Sha256::digest(body))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_ignores_timing() {
        let checks = vec![Check::pass("a"), Check::fail("b", serde_json::json!({"x": 1}))];
        let r1 = Report::new("inst", checks.clone(), 10);
        let r2 = Report::new("inst", checks, 9999);
        assert_eq!(r1.digest, r2.digest);
        assert!(!r1.passed());
        assert_eq!(r1.n_failed(), 1);
    }
}
