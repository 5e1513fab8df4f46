//! Structured pass/fail reporting shared by the verification routines and
//! the command-line frontend.

use serde::{Deserialize, Serialize};

/// One verified identity (or one detected failure), with enough location
/// data to reproduce it by hand.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckItem {
    pub name: String,
    /// Where the check lives: class, root of unity, pole order, t-monomial.
    pub location: String,
    pub pass: bool,
    /// On failure: the two sides that disagreed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckItem {
    pub fn pass(name: impl Into<String>, location: impl Into<String>) -> CheckItem {
        CheckItem {
            name: name.into(),
            location: location.into(),
            pass: true,
            witness: None,
        }
    }

    pub fn fail(
        name: impl Into<String>,
        location: impl Into<String>,
        witness: impl Into<String>,
    ) -> CheckItem {
        CheckItem {
            name: name.into(),
            location: location.into(),
            pass: false,
            witness: Some(witness.into()),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<CheckItem>,
}

impl Report {
    pub fn new(command: impl Into<String>, checks: Vec<CheckItem>) -> Report {
        let passed = checks.iter().filter(|c| c.pass).count();
        let failed = checks.len() - passed;
        Report {
            command: command.into(),
            passed,
            failed,
            checks,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }
}

pub fn all_pass(checks: &[CheckItem]) -> bool {
    checks.iter().all(|c| c.pass)
}
