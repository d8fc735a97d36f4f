//! Structured pass/fail reports for exact and sampled checks.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// How strongly a check establishes its claim.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Evidence {
    /// Exhaustive exact computation over the stated finite set.
    Exact,
    /// Exact computation at sampled points only.
    Sampled,
    /// Floating-point measurement against a tolerance.
    Numerical,
}

impl Evidence {
    pub fn label(self) -> &'static str {
        match self {
            Evidence::Exact => "exact",
            Evidence::Sampled => "evidence (sampled)",
            Evidence::Numerical => "numerical",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    pub pass: bool,
    pub evidence: Evidence,
    pub detail: String,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub name: String,
    pub checks: Vec<CheckRecord>,
}

impl Certificate {
    pub fn new(name: &str) -> Self {
        Certificate {
            name: name.to_string(),
            checks: Vec::new(),
        }
    }

    pub fn record(
        &mut self,
        name: &str,
        pass: bool,
        evidence: Evidence,
        detail: String,
        witness: Option<String>,
    ) {
        self.checks.push(CheckRecord {
            name: name.to_string(),
            pass,
            evidence,
            detail,
            witness,
        });
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// First failing check, if any.
    pub fn first_failure(&self) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| !c.pass)
    }
}
