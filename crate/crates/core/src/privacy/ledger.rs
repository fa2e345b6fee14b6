//! Append-only privacy budget accounting.
//!
//! Releases computed on the same data compose sequentially (their epsilons
//! add up). Releases on disjoint groups compose in parallel: the overall
//! charge is the largest per-group total.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::mechanism::{Coverage, Release};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LedgerEntry {
    pub release_id: u64,
    pub epsilon: f64,
    pub group: u64,
    pub coverage: Coverage,
}

#[derive(Debug, Clone, Default)]
pub struct PrivacyBudgetLedger {
    entries: Vec<LedgerEntry>,
}

impl PrivacyBudgetLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn append(&mut self, epsilon: f64, group: u64, coverage: Coverage) -> Result<u64> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid(format!(
                "ledger epsilon must be finite and > 0, got {epsilon}"
            )));
        }
        let release_id = self.entries.len() as u64;
        self.entries.push(LedgerEntry {
            release_id,
            epsilon,
            group,
            coverage,
        });
        Ok(release_id)
    }

    /// Records a full-coordinate release of `epsilon` against `group`.
    pub fn record(&mut self, epsilon: f64, group: u64) -> Result<u64> {
        self.append(epsilon, group, Coverage::Full)
    }

    /// Charges a release. Noiseless releases carry no guarantee and are not
    /// recorded; `None` is returned for them.
    pub fn record_release<T>(&mut self, release: &Release<T>, group: u64) -> Result<Option<u64>> {
        match release.coverage {
            Coverage::Noiseless => Ok(None),
            coverage => self.append(release.epsilon, group, coverage).map(Some),
        }
    }

    pub fn group_total(&self, group: u64) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.group == group)
            .map(|e| e.epsilon)
            .sum()
    }

    /// Sum within each group, maximum across groups; 0 when empty.
    pub fn total(&self) -> f64 {
        let mut groups: BTreeMap<u64, f64> = BTreeMap::new();
        for e in &self.entries {
            *groups.entry(e.group).or_insert(0.0) += e.epsilon;
        }
        groups.values().fold(0.0, |m, &v| m.max(v))
    }

    /// `release_id,epsilon,group,coverage` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("release_id,epsilon,group,coverage\n");
        for e in &self.entries {
            writeln!(
                out,
                "{},{},{},{}",
                e.release_id,
                e.epsilon,
                e.group,
                e.coverage.as_str()
            )
            .unwrap();
        }
        out
    }
}
