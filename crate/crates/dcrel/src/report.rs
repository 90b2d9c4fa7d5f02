//! Result of a named check: verdict, witness or certificate, probe-set
//! description, timing.

use serde::Serialize;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertyReport {
    pub property: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub probes: String,
    pub ms: u128,
}

impl PropertyReport {
    /// Run a check that yields `None` when the property holds and a witness
    /// when it fails.
    pub fn run<F>(property: &str, probes: &str, f: F) -> crate::error::Result<PropertyReport>
    where
        F: FnOnce() -> crate::error::Result<Option<String>>,
    {
        let t0 = Instant::now();
        let outcome = f()?;
        Ok(PropertyReport {
            property: property.to_string(),
            verdict: if outcome.is_none() {
                Verdict::Holds
            } else {
                Verdict::Fails
            },
            witness: outcome,
            probes: probes.to_string(),
            ms: t0.elapsed().as_millis(),
        })
    }

    pub fn skipped(property: &str, reason: &str) -> PropertyReport {
        PropertyReport {
            property: property.to_string(),
            verdict: Verdict::Skipped,
            witness: Some(reason.to_string()),
            probes: String::new(),
            ms: 0,
        }
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn line(&self) -> String {
        let mark = match self.verdict {
            Verdict::Holds => "PASS",
            Verdict::Fails => "FAIL",
            Verdict::Skipped => "SKIP",
        };
        match &self.witness {
            Some(w) if self.verdict != Verdict::Holds => {
                format!("{mark} {} ({w})", self.property)
            }
            _ => format!("{mark} {}", self.property),
        }
    }
}
