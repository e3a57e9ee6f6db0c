//! Reference oracles and the numbered acceptance suite for `kcc-core`.
//!
//! Every criterion returns a [`CriterionReport`]; [`run_all`] evaluates the
//! full suite in order.

pub mod acceptance;
pub mod oracle;

use std::fmt;
use std::time::Duration;

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {}: {} ({:.2} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

pub use acceptance::{run_all, run_criterion, CRITERIA};
