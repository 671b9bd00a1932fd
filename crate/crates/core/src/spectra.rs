//! Per-product test outcomes and coverage, and the (ef, ep, nf, np)
//! counts every suspiciousness metric consumes.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Product, StatementId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCase {
    pub id: String,
    pub outcome: Outcome,
    pub covered: BTreeSet<StatementId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure_point: Option<StatementId>,
}

impl TestCase {
    pub fn failed(&self) -> bool {
        self.outcome == Outcome::Fail
    }

    pub fn covers(&self, s: &str) -> bool {
        self.covered.contains(s)
    }
}

/// The program spectra of one product.
#[derive(Debug, Clone)]
pub struct ProductSpectra {
    product: Product,
    tests: Vec<TestCase>,
}

impl ProductSpectra {
    /// Validates that the test list is non-empty, coverage stays inside the
    /// product, and failure points are covered and only set on failed tests.
    pub fn new(product: Product, tests: Vec<TestCase>) -> Result<Self> {
        let at = |i: usize, field: &str| format!("spectra[{}].tests[{i}].{field}", product.id);
        if tests.is_empty() {
            return Err(Error::validation(
                format!("spectra[{}].tests", product.id),
                "product has no tests",
            ));
        }
        let mut ids = BTreeSet::new();
        for (i, t) in tests.iter().enumerate() {
            if !ids.insert(t.id.as_str()) {
                return Err(Error::validation(
                    at(i, "id"),
                    format!("duplicate test `{}`", t.id),
                ));
            }
            if let Some(s) = t.covered.iter().find(|s| !product.contains_statement(s.as_str())) {
                return Err(Error::validation(
                    at(i, "covered"),
                    format!("statement `{s}` is not part of product `{}`", product.id),
                ));
            }
            if let Some(fp) = &t.failure_point {
                if t.outcome == Outcome::Pass {
                    return Err(Error::validation(
                        at(i, "failure_point"),
                        "passing test must not carry a failure point",
                    ));
                }
                if !t.covered.contains(fp) {
                    return Err(Error::validation(
                        at(i, "failure_point"),
                        format!("failure point `{fp}` is not covered by the test"),
                    ));
                }
            }
        }
        Ok(Self { product, tests })
    }

    pub fn product(&self) -> &Product {
        &self.product
    }

    pub fn tests(&self) -> &[TestCase] {
        &self.tests
    }

    pub fn is_failing(&self) -> bool {
        self.tests.iter().any(TestCase::failed)
    }

    pub fn failed_tests(&self) -> impl Iterator<Item = &TestCase> {
        self.tests.iter().filter(|t| t.failed())
    }

    /// Statements executed by at least one failed test.
    pub fn failed_coverage(&self) -> BTreeSet<StatementId> {
        self.failed_tests()
            .flat_map(|t| t.covered.iter().cloned())
            .collect()
    }

    fn totals(&self) -> (u64, u64) {
        let failed = self.tests.iter().filter(|t| t.failed()).count() as u64;
        (failed, self.tests.len() as u64 - failed)
    }
}

/// Counts of failed/passed tests that execute (`ef`, `ep`) or do not
/// execute (`nf`, `np`) a statement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash, Serialize, Deserialize)]
pub struct SpectrumCounts {
    pub ef: u64,
    pub ep: u64,
    pub nf: u64,
    pub np: u64,
}

impl SpectrumCounts {
    pub fn new(ef: u64, ep: u64, nf: u64, np: u64) -> Self {
        Self { ef, ep, nf, np }
    }

    pub fn total_failed(&self) -> u64 {
        self.ef + self.nf
    }

    pub fn total_passed(&self) -> u64 {
        self.ep + self.np
    }
}

impl std::ops::Add for SpectrumCounts {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self::new(self.ef + o.ef, self.ep + o.ep, self.nf + o.nf, self.np + o.np)
    }
}

/// Splits products into those passing every test and those failing at
/// least one, preserving input order.
pub fn classify_products(all: &[ProductSpectra]) -> Result<(Vec<&ProductSpectra>, Vec<&ProductSpectra>)> {
    let mut passing = Vec::new();
    let mut failing = Vec::new();
    for p in all {
        if p.tests.is_empty() {
            return Err(Error::validation(
                format!("spectra[{}].tests", p.product.id),
                "product has no tests",
            ));
        }
        if p.is_failing() {
            failing.push(p);
        } else {
            passing.push(p);
        }
    }
    Ok((passing, failing))
}

/// Counts over the tests of a single product.
pub fn count_spectrum(spectra: &ProductSpectra, s: &str) -> Result<SpectrumCounts> {
    if !spectra.product.contains_statement(s) {
        return Err(Error::StatementNotInProduct {
            statement: s.to_owned(),
            product: spectra.product.id.clone(),
        });
    }
    Ok(count_in(spectra, s))
}

fn count_in(spectra: &ProductSpectra, s: &str) -> SpectrumCounts {
    let (failed, passed) = spectra.totals();
    let mut c = SpectrumCounts::default();
    for t in &spectra.tests {
        if t.covers(s) {
            match t.outcome {
                Outcome::Fail => c.ef += 1,
                Outcome::Pass => c.ep += 1,
            }
        }
    }
    c.nf = failed - c.ef;
    c.np = passed - c.ep;
    c
}

/// Counts over every test of every product, treating the whole product
/// line as one program. Tests of products lacking `s` count as not
/// executing it.
pub fn count_spectrum_global(all: &[ProductSpectra], s: &str) -> SpectrumCounts {
    all.iter()
        .map(|p| count_in(p, s))
        .fold(SpectrumCounts::default(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::elevator;

    #[test]
    fn elevator_classification() {
        let e = elevator();
        let (passing, failing) = classify_products(&e.spectra).unwrap();
        let ids = |v: &[&ProductSpectra]| v.iter().map(|p| p.product().id.clone()).collect::<Vec<_>>();
        assert_eq!(ids(&passing), ["p1", "p2", "p3", "p4", "p5"]);
        assert_eq!(ids(&failing), ["p6", "p7"]);
    }

    #[test]
    fn p7_s31_counts() {
        let e = elevator();
        let p7 = e.spectra_of("p7");
        assert_eq!(
            count_spectrum(p7, "s31").unwrap(),
            SpectrumCounts::new(1, 1, 0, 1)
        );
    }

    #[test]
    fn statement_outside_product_is_an_error() {
        let e = elevator();
        assert!(matches!(
            count_spectrum(e.spectra_of("p7"), "s26"),
            Err(Error::StatementNotInProduct { .. })
        ));
    }

    #[test]
    fn global_counts_sum_products() {
        let e = elevator();
        // s31 lives in p5, p6, p7: failed tests covering it are the two in
        // p6 and the one in p7.
        let g = count_spectrum_global(&e.spectra, "s31");
        assert_eq!(g.ef, 3);
        for s in e.system.statements() {
            let g = count_spectrum_global(&e.spectra, s.id.as_str());
            let total: SpectrumCounts = e
                .spectra
                .iter()
                .map(|p| count_in(p, s.id.as_str()))
                .fold(SpectrumCounts::default(), |a, b| a + b);
            assert_eq!(g, total);
            let all_tests: u64 = e.spectra.iter().map(|p| p.tests().len() as u64).sum();
            assert_eq!(g.ef + g.ep + g.nf + g.np, all_tests);
        }
    }

    #[test]
    fn dead_statement_counts() {
        let e = elevator();
        // s21 only runs when the elevator idles empty; no failed test hits it.
        let c = count_spectrum(e.spectra_of("p6"), "s21").unwrap();
        assert_eq!(c.ef, 0);
        assert_eq!(c.nf, 2);
    }

    #[test]
    fn rejects_invalid_spectra() {
        let e = elevator();
        let p = e.product("p7").clone();
        assert!(ProductSpectra::new(p.clone(), vec![]).is_err());
        let bad = TestCase {
            id: "t".into(),
            outcome: Outcome::Pass,
            covered: ["s26".into()].into(),
            failure_point: None,
        };
        assert!(ProductSpectra::new(p.clone(), vec![bad]).is_err());
        let fp_on_pass = TestCase {
            id: "t".into(),
            outcome: Outcome::Pass,
            covered: ["s1".into()].into(),
            failure_point: Some("s1".into()),
        };
        assert!(ProductSpectra::new(p, vec![fp_on_pass]).is_err());
    }
}
