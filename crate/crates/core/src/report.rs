//! Named check records and their aggregation.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        }
    }
}

/// How `residual` is compared with `tolerance`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// pass iff residual ≤ tolerance
    Below,
    /// pass iff residual > tolerance (negative controls)
    Above,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    pub residual: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub samples: usize,
    pub seed: u64,
    /// Samples discarded by the sampler's exclusion rules.
    pub rejected: usize,
    /// Plain statement of the identity being checked.
    pub claim: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observed: Option<f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<String, String>,
}

impl CheckRecord {
    /// Passes iff `residual ≤ tolerance`. NaN fails.
    pub fn below(
        name: impl Into<String>,
        claim: impl Into<String>,
        residual: f64,
        tolerance: f64,
    ) -> Self {
        let pass = residual <= tolerance;
        Self::build(name, claim, residual, tolerance, Bound::Below, pass)
    }

    /// Passes iff `residual > threshold`. NaN fails.
    pub fn above(
        name: impl Into<String>,
        claim: impl Into<String>,
        residual: f64,
        threshold: f64,
    ) -> Self {
        let pass = residual > threshold;
        Self::build(name, claim, residual, threshold, Bound::Above, pass)
    }

    /// Integer-valued claim: passes iff `observed == expected`.
    pub fn count(
        name: impl Into<String>,
        claim: impl Into<String>,
        expected: usize,
        observed: usize,
    ) -> Self {
        let residual = (expected as f64 - observed as f64).abs();
        let mut r = Self::build(
            name,
            claim,
            residual,
            0.0,
            Bound::Below,
            expected == observed,
        );
        r.expected = Some(expected as f64);
        r.observed = Some(observed as f64);
        r
    }

    /// A check that could not be evaluated.
    pub fn error(name: impl Into<String>, claim: impl Into<String>, err: &Error) -> Self {
        let mut r = Self::build(name, claim, f64::NAN, 0.0, Bound::Below, false);
        r.status = Status::Error;
        r.notes.insert("error".into(), err.to_string());
        r
    }

    fn build(
        name: impl Into<String>,
        claim: impl Into<String>,
        residual: f64,
        tolerance: f64,
        bound: Bound,
        pass: bool,
    ) -> Self {
        Self {
            name: name.into(),
            status: if pass { Status::Pass } else { Status::Fail },
            residual,
            tolerance,
            bound,
            samples: 1,
            seed: 0,
            rejected: 0,
            claim: claim.into(),
            expected: None,
            observed: None,
            notes: BTreeMap::new(),
        }
    }

    pub fn with_samples(mut self, samples: usize, seed: u64) -> Self {
        self.samples = samples;
        self.seed = seed;
        self
    }

    pub fn with_rejected(mut self, rejected: usize) -> Self {
        self.rejected = rejected;
        self
    }

    pub fn with_values(mut self, expected: f64, observed: f64) -> Self {
        self.expected = Some(expected);
        self.observed = Some(observed);
        self
    }

    pub fn note(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.notes.insert(key.into(), value.to_string());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Ordered collection of check records.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct VerificationReport {
    pub records: Vec<CheckRecord>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, r: CheckRecord) {
        self.records.push(r);
    }

    /// Appends every record of `other`, prefixing names with `prefix.`.
    pub fn absorb(&mut self, prefix: &str, other: VerificationReport) {
        for mut r in other.records {
            if !prefix.is_empty() {
                r.name = format!("{prefix}.{}", r.name);
            }
            self.records.push(r);
        }
    }

    /// Records a result, converting an evaluation error into an ERROR record.
    pub fn push_result(&mut self, name: &str, claim: &str, r: crate::error::Result<CheckRecord>) {
        match r {
            Ok(rec) => self.push(rec),
            Err(e) => self.push(CheckRecord::error(name, claim, &e)),
        }
    }

    pub fn get(&self, name: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.name == name)
    }

    pub fn all_pass(&self) -> bool {
        self.records.iter().all(CheckRecord::passed)
    }

    pub fn summary(&self) -> Summary {
        let mut s = Summary {
            total: self.records.len(),
            ..Summary::default()
        };
        for r in &self.records {
            match r.status {
                Status::Pass => s.passed += 1,
                Status::Fail => s.failed += 1,
                Status::Error => s.errors += 1,
            }
        }
        s
    }

    pub fn sort_by_name(&mut self) {
        self.records.sort_by(|a, b| a.name.cmp(&b.name));
    }
}

/// Running maximum of absolute residuals.
#[derive(Clone, Copy, Debug, Default)]
pub struct MaxResidual(pub f64);

impl MaxResidual {
    pub fn add(&mut self, v: f64) {
        // NaN must poison the maximum
        if v.is_nan() || self.0.is_nan() {
            self.0 = f64::NAN;
        } else {
            self.0 = self.0.max(v.abs());
        }
    }

    pub fn add_all(&mut self, vs: impl IntoIterator<Item = f64>) {
        for v in vs {
            self.add(v);
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_fails_both_bounds() {
        assert!(!CheckRecord::below("a", "", f64::NAN, 1.0).passed());
        assert!(!CheckRecord::above("a", "", f64::NAN, 1.0).passed());
    }

    #[test]
    fn summary_counts() {
        let mut r = VerificationReport::new();
        r.push(CheckRecord::below("a", "", 0.0, 1.0));
        r.push(CheckRecord::below("b", "", 2.0, 1.0));
        r.push(CheckRecord::error("c", "", &Error::DegenerateMetric));
        assert_eq!(
            r.summary(),
            Summary {
                total: 3,
                passed: 1,
                failed: 1,
                errors: 1
            }
        );
    }

    #[test]
    fn max_residual_tracks_nan() {
        let mut m = MaxResidual::default();
        m.add(-3.0);
        m.add(1.0);
        assert_eq!(m.get(), 3.0);
        m.add(f64::NAN);
        assert!(m.get().is_nan());
    }
}
