//! Machine-readable verification reports.

use std::time::Instant;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// One checked identity.
///
/// For checked entries `pass` is exactly `residual <= tolerance`; skipped
/// entries carry no residual and never pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub name: String,
    pub anchor: String,
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub entries: Vec<Entry>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>) -> Self {
        Self {
            suite: suite.into(),
            entries: Vec::new(),
        }
    }

    /// Records `residual` against `tolerance`. NaN residuals fail.
    pub fn check(
        &mut self,
        name: impl Into<String>,
        anchor: impl Into<String>,
        residual: f64,
        tolerance: f64,
    ) -> &mut Entry {
        let pass = residual <= tolerance;
        self.entries.push(Entry {
            name: name.into(),
            anchor: anchor.into(),
            residual: Some(residual),
            tolerance,
            pass,
            status: if pass { Status::Pass } else { Status::Fail },
            note: None,
            wall_time_ms: 0.0,
        });
        self.entries.last_mut().unwrap()
    }

    /// Runs `f`, records its residual and the elapsed time.
    pub fn timed<F>(&mut self, name: &str, anchor: &str, tolerance: f64, f: F) -> &mut Entry
    where
        F: FnOnce() -> f64,
    {
        let start = Instant::now();
        let residual = f();
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        let entry = self.check(name, anchor, residual, tolerance);
        entry.wall_time_ms = elapsed;
        entry
    }

    pub fn skip(
        &mut self,
        name: impl Into<String>,
        anchor: impl Into<String>,
        reason: impl Into<String>,
    ) -> &mut Entry {
        self.entries.push(Entry {
            name: name.into(),
            anchor: anchor.into(),
            residual: None,
            tolerance: 0.0,
            pass: false,
            status: Status::Skipped,
            note: Some(reason.into()),
            wall_time_ms: 0.0,
        });
        self.entries.last_mut().unwrap()
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.entries.extend(other.entries);
    }

    /// True when no checked entry failed. Skipped entries are ignored.
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| e.status == Status::Fail)
    }

    pub fn skipped(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| e.status == Status::Skipped)
    }

    pub fn entry(&self, name: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Copy with every `wall_time_ms` zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        let mut out = self.clone();
        for e in &mut out.entries {
            e.wall_time_ms = 0.0;
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_iff_within_tolerance() {
        let mut r = VerificationReport::new("t");
        r.check("a", "x", 1e-12, 1e-10);
        r.check("b", "x", 1e-9, 1e-10);
        r.check("c", "x", f64::NAN, 1.0);
        r.skip("d", "x", "budget");
        let e: Vec<_> = r.entries.iter().map(|e| e.pass).collect();
        assert_eq!(e, vec![true, false, false, false]);
        for e in r.entries.iter().filter(|e| e.status != Status::Skipped) {
            assert_eq!(e.pass, e.residual.unwrap() <= e.tolerance);
        }
        assert!(!r.passed());
        assert_eq!(r.failures().count(), 2);
        assert_eq!(r.skipped().count(), 1);
    }

    #[test]
    fn json_key_order_is_stable() {
        let mut r = VerificationReport::new("s");
        r.check("a", "x", 0.0, 0.0);
        let json = r.to_json();
        let keys = [
            "\"name\"",
            "\"anchor\"",
            "\"residual\"",
            "\"tolerance\"",
            "\"pass\"",
        ];
        let pos: Vec<usize> = keys.iter().map(|k| json.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        let back: VerificationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}
