//! Outcome of a single verification, rendered as one report line.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIPPED",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: String,
    pub status: Status,
    /// Highest spectral order at which the identity was verified exactly.
    pub certified_order: i64,
    pub detail: String,
}

impl CheckOutcome {
    pub fn pass(name: &str, certified_order: i64, detail: impl Into<String>) -> Self {
        CheckOutcome { name: name.into(), status: Status::Pass, certified_order, detail: detail.into() }
    }

    pub fn fail(name: &str, certified_order: i64, detail: impl Into<String>) -> Self {
        CheckOutcome { name: name.into(), status: Status::Fail, certified_order, detail: detail.into() }
    }

    pub fn skipped(name: &str, detail: impl Into<String>) -> Self {
        CheckOutcome { name: name.into(), status: Status::Skipped, certified_order: -1, detail: detail.into() }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Folds a list of sub-results into one outcome; the certified order is
    /// the minimum over the parts.
    pub fn combine(name: &str, parts: Vec<CheckOutcome>) -> Self {
        let order = parts.iter().map(|p| p.certified_order).min().unwrap_or(-1);
        match parts.iter().find(|p| !p.passed()) {
            Some(bad) => CheckOutcome::fail(name, order, format!("{}: {}", bad.name, bad.detail)),
            None => {
                let detail = parts.iter().filter(|p| !p.detail.is_empty()).map(|p| p.detail.clone()).collect::<Vec<_>>().join("; ");
                CheckOutcome::pass(name, order, detail)
            }
        }
    }
}
