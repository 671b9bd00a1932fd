//! Detection of suspicious partial configurations: minimal sets of feature
//! selections that no passing configuration of the sample contains.
//!
//! For each failing configuration `c`, the candidate pool is the set of
//! selections of `c` missing from at least one passing configuration
//! (`SFS_c`). Subsets of the pool are tried by ascending size up to `K`;
//! a subset is accepted when no passing configuration contains it and it is
//! not a superset of anything already accepted.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Configuration, FeatureSelection, PartialConfiguration, Product};

pub const DEFAULT_K: usize = 7;

pub fn default_k() -> usize {
    DEFAULT_K
}

/// A suspicious partial configuration and the failing products it was
/// found in.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SuspiciousPc {
    pub selections: PartialConfiguration,
    pub origin: BTreeSet<String>,
}

impl SuspiciousPc {
    pub fn len(&self) -> usize {
        self.selections.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl std::fmt::Display for SuspiciousPc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.selections.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SfsSet {
    pub config: String,
    pub selections: BTreeSet<FeatureSelection>,
}

/// Union of `c \ c'` over every passing `c'`. With no passing
/// configuration, the whole of `c`.
pub fn suspicious_feature_selections(
    c: &Configuration,
    passing: &[&Configuration],
) -> Result<BTreeSet<FeatureSelection>> {
    if passing.is_empty() {
        return Ok(c.iter().collect());
    }
    let mut out = BTreeSet::new();
    for p in passing {
        out.extend(c.diff(p)?);
    }
    Ok(out)
}

/// SFS of a failing product against passing products.
pub fn sfs_of(c: &Product, passing: &[&Product]) -> Result<SfsSet> {
    let configs: Vec<&Configuration> = passing.iter().map(|p| &p.config).collect();
    Ok(SfsSet {
        config: c.id.clone(),
        selections: suspicious_feature_selections(&c.config, &configs)?,
    })
}

/// No passing configuration contains `pc`, and at least one failing one
/// does.
pub fn bug_revelation(
    pc: &PartialConfiguration,
    passing: &[&Configuration],
    failing: &[&Configuration],
) -> bool {
    let contains = |c: &&Configuration| c.contains(pc).unwrap_or(false);
    !passing.iter().any(contains) && failing.iter().any(contains)
}

/// Detects suspicious partial configurations of size at most `k`.
///
/// Output is sorted by size, then selections, and does not depend on the
/// order of the inputs.
pub fn detect_spcs(passing: &[&Product], failing: &[&Product], k: usize) -> Result<Vec<SuspiciousPc>> {
    if k < 1 {
        return Err(Error::InvalidInteractionSize(k));
    }
    if failing.is_empty() {
        return Err(Error::NoFailingProducts);
    }
    let mut failing: Vec<&Product> = failing.to_vec();
    failing.sort_by(|a, b| a.id.cmp(&b.id));
    let pass_cfg: Vec<&Configuration> = passing.iter().map(|p| &p.config).collect();
    let fail_cfg: Vec<&Configuration> = failing.iter().map(|p| &p.config).collect();

    let mut accepted: BTreeMap<PartialConfiguration, BTreeSet<String>> = BTreeMap::new();
    for product in &failing {
        let pool: Vec<FeatureSelection> = suspicious_feature_selections(&product.config, &pass_cfg)?
            .into_iter()
            .collect();
        for size in 1..=k.min(pool.len()) {
            for combo in Combinations::new(pool.len(), size) {
                let cand = PartialConfiguration::from_selections(combo.iter().map(|&i| pool[i].clone()))?;
                // Seen from an earlier failing product: merge the origin.
                if let Some(origins) = accepted.get_mut(&cand) {
                    origins.insert(product.id.clone());
                    continue;
                }
                if accepted.keys().any(|a| a.is_subset_of(&cand)) {
                    continue;
                }
                if bug_revelation(&cand, &pass_cfg, &fail_cfg) {
                    accepted.insert(cand, BTreeSet::from([product.id.clone()]));
                }
            }
        }
    }

    let mut out: Vec<SuspiciousPc> = accepted
        .into_iter()
        .map(|(selections, origin)| SuspiciousPc { selections, origin })
        .collect();
    retain_minimal(&mut out);
    out.sort_by(|a, b| {
        a.len()
            .cmp(&b.len())
            .then_with(|| a.selections.cmp(&b.selections))
    });
    Ok(out)
}

/// Drops any member that strictly contains another member. Pruning
/// already guarantees this; the pass re-verifies it.
fn retain_minimal(spcs: &mut Vec<SuspiciousPc>) {
    let before = spcs.len();
    let snapshot: Vec<PartialConfiguration> = spcs.iter().map(|s| s.selections.clone()).collect();
    spcs.retain(|s| {
        !snapshot
            .iter()
            .any(|o| o != &s.selections && o.is_subset_of(&s.selections))
    });
    if spcs.len() != before {
        log::warn!(
            "dropped {} non-minimal suspicious configurations",
            before - spcs.len()
        );
    }
}

/// Lexicographic k-combinations of `0..n`.
pub(crate) struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            idx: (0..k).collect(),
            done: k > n || k == 0,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::elevator;

    fn sel(f: &str, on: bool) -> FeatureSelection {
        FeatureSelection::new(f, on)
    }

    fn pc(items: &[(&str, bool)]) -> PartialConfiguration {
        PartialConfiguration::from_selections(items.iter().map(|&(f, on)| sel(f, on))).unwrap()
    }

    fn split(e: &crate::fixtures::Elevator) -> (Vec<&Product>, Vec<&Product>) {
        let (pass, fail) = crate::spectra::classify_products(&e.spectra).unwrap();
        (
            pass.into_iter().map(|s| s.product()).collect(),
            fail.into_iter().map(|s| s.product()).collect(),
        )
    }

    #[test]
    fn sfs_of_failing_configurations() {
        let e = elevator();
        let (pass, _) = split(&e);
        let sfs6 = sfs_of(e.product("p6"), &pass).unwrap();
        assert_eq!(
            sfs6.selections,
            BTreeSet::from([
                sel("Empty", true),
                sel("Weight", true),
                sel("TwoThirdsFull", false),
                sel("Overloaded", true)
            ])
        );
        let sfs7 = sfs_of(e.product("p7"), &pass).unwrap();
        assert_eq!(
            sfs7.selections,
            BTreeSet::from([
                sel("Empty", false),
                sel("Weight", true),
                sel("TwoThirdsFull", false),
                sel("Overloaded", true)
            ])
        );
        let c = &e.product("p1").config;
        assert!(suspicious_feature_selections(c, &[c]).unwrap().is_empty());
    }

    #[test]
    fn bug_revelation_examples() {
        let e = elevator();
        let (pass, fail) = split(&e);
        let pass: Vec<&Configuration> = pass.iter().map(|p| &p.config).collect();
        let fail: Vec<&Configuration> = fail.iter().map(|p| &p.config).collect();
        assert!(bug_revelation(
            &pc(&[("TwoThirdsFull", false), ("Overloaded", true)]),
            &pass,
            &fail
        ));
        assert!(!bug_revelation(&pc(&[("Overloaded", true)]), &pass, &fail));
        assert!(!bug_revelation(
            &pc(&[("Empty", true), ("Weight", true)]),
            &pass,
            &fail
        ));
        // Not contained in any failing configuration either.
        assert!(!bug_revelation(
            &pc(&[("Weight", false), ("Overloaded", true)]),
            &pass,
            &fail
        ));
    }

    #[test]
    fn elevator_spcs() {
        let e = elevator();
        let (pass, fail) = split(&e);
        let spcs = detect_spcs(&pass, &fail, DEFAULT_K).unwrap();
        let sets: Vec<_> = spcs.iter().map(|s| s.selections.clone()).collect();
        assert_eq!(
            sets,
            vec![
                pc(&[("Empty", true), ("Overloaded", true)]),
                pc(&[("Overloaded", true), ("TwoThirdsFull", false)]),
            ]
        );
        assert_eq!(spcs[0].origin, BTreeSet::from(["p6".to_owned()]));
        assert_eq!(spcs[1].origin, BTreeSet::from(["p6".to_owned(), "p7".to_owned()]));
    }

    #[test]
    fn k_limits_candidate_size() {
        let e = elevator();
        let (pass, fail) = split(&e);
        assert!(detect_spcs(&pass, &fail, 1).unwrap().is_empty());
        assert!(matches!(
            detect_spcs(&pass, &fail, 0),
            Err(Error::InvalidInteractionSize(0))
        ));
        assert!(matches!(
            detect_spcs(&pass, &[], 3),
            Err(Error::NoFailingProducts)
        ));
        // K beyond the pool size is harmless.
        assert_eq!(detect_spcs(&pass, &fail, 50).unwrap().len(), 2);
    }

    #[test]
    fn single_selection_difference() {
        let e = elevator();
        let p1 = e.product("p1");
        let p7 = e.product("p7");
        let spcs = detect_spcs(&[p1], &[p7], DEFAULT_K).unwrap();
        assert_eq!(spcs.len(), 1);
        assert_eq!(spcs[0].selections, pc(&[("Overloaded", true)]));
    }

    #[test]
    fn no_passing_gives_singletons() {
        let e = elevator();
        let spcs = detect_spcs(&[], &[e.product("p7")], DEFAULT_K).unwrap();
        assert_eq!(spcs.len(), e.product("p7").config.len());
        assert!(spcs.iter().all(|s| s.len() == 1));
    }

    #[test]
    fn input_order_does_not_matter() {
        let e = elevator();
        let (mut pass, mut fail) = split(&e);
        let a = detect_spcs(&pass, &fail, DEFAULT_K).unwrap();
        pass.reverse();
        fail.reverse();
        assert_eq!(a, detect_spcs(&pass, &fail, DEFAULT_K).unwrap());
    }

    #[test]
    fn combinations_enumerate_lexicographically() {
        let all: Vec<_> = Combinations::new(4, 2).collect();
        assert_eq!(
            all,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(Combinations::new(3, 0).count(), 0);
        assert_eq!(Combinations::new(2, 3).count(), 0);
        assert_eq!(Combinations::new(5, 5).count(), 1);
    }
}
