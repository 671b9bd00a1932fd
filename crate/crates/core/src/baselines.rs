//! Comparison techniques: SBFL over the whole product line, SBFL restricted
//! to backward slices from failure points, and feature-level ranking.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::dependency::backward_slice;
use crate::error::{Error, Result};
use crate::metrics::Metric;
use crate::model::{FeatureId, Product, SplSystem, StatementId};
use crate::ranking::{product_counts, RankedList};
use crate::spectra::{classify_products, count_spectrum_global, ProductSpectra, SpectrumCounts};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TechniqueId {
    #[default]
    VarCop,
    Sbfl,
    SSbfl,
    FeatureBased,
}

impl TechniqueId {
    pub const ALL: [TechniqueId; 4] = [
        TechniqueId::VarCop,
        TechniqueId::Sbfl,
        TechniqueId::SSbfl,
        TechniqueId::FeatureBased,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TechniqueId::VarCop => "varcop",
            TechniqueId::Sbfl => "sbfl",
            TechniqueId::SSbfl => "ssbfl",
            TechniqueId::FeatureBased => "fb",
        }
    }
}

impl fmt::Display for TechniqueId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TechniqueId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|t| t.name() == lower)
            .ok_or_else(|| Error::UnknownOption {
                kind: "technique",
                value: s.to_owned(),
            })
    }
}

/// Statements executed by at least one failed test of any product.
pub fn sbfl_candidates(spectra_all: &[ProductSpectra]) -> Result<BTreeSet<StatementId>> {
    let mut out = BTreeSet::new();
    let mut any_failed = false;
    for p in spectra_all {
        for t in p.failed_tests() {
            any_failed = true;
            out.extend(t.covered.iter().cloned());
        }
    }
    if !any_failed {
        return Err(Error::NoFailedTests);
    }
    Ok(out)
}

fn rank_globally(
    spectra_all: &[ProductSpectra],
    candidates: BTreeSet<StatementId>,
    metric: Metric,
) -> RankedList {
    RankedList::from_scored(
        candidates
            .into_iter()
            .map(|s| {
                let score = metric.score(count_spectrum_global(spectra_all, s.as_str()));
                (s, score)
            })
            .collect(),
    )
}

/// The product line treated as one program: candidates executed by a
/// failed test, scored on counts summed over every product's tests.
pub fn sbfl_global(spectra_all: &[ProductSpectra], metric: Metric) -> Result<RankedList> {
    Ok(rank_globally(spectra_all, sbfl_candidates(spectra_all)?, metric))
}

/// Union over failed tests of failing products of the backward slice from
/// the test's failure point, restricted to what the test executed.
pub fn s_sbfl_candidates(
    system: &SplSystem,
    spectra_all: &[ProductSpectra],
) -> Result<BTreeSet<StatementId>> {
    let mut out = BTreeSet::new();
    let mut any_failed = false;
    for p in spectra_all {
        for t in p.failed_tests() {
            any_failed = true;
            let fp = t
                .failure_point
                .as_ref()
                .ok_or_else(|| Error::MissingFailurePoint {
                    product: p.product().id.clone(),
                    test: t.id.clone(),
                })?;
            let slice = backward_slice(system, fp.as_str(), p.product())?;
            out.extend(slice.into_iter().filter(|s| t.covered.contains(s)));
        }
    }
    if !any_failed {
        return Err(Error::NoFailedTests);
    }
    Ok(out)
}

pub fn s_sbfl(system: &SplSystem, spectra_all: &[ProductSpectra], metric: Metric) -> Result<RankedList> {
    Ok(rank_globally(
        spectra_all,
        s_sbfl_candidates(system, spectra_all)?,
        metric,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureScore {
    pub feature: FeatureId,
    pub counts: SpectrumCounts,
    pub score: f64,
    pub rank: usize,
}

/// Feature ranking with products as tests, and the statement ranking it
/// induces: every statement inherits its feature's score, ordered by
/// score, then feature name, then statement id.
pub fn feature_based(
    system: &SplSystem,
    spectra_all: &[ProductSpectra],
    metric: Metric,
) -> Result<(Vec<FeatureScore>, RankedList)> {
    let (passing, failing) = classify_products(spectra_all)?;
    if failing.is_empty() {
        return Err(Error::NoFailingProducts);
    }
    let passing: Vec<&Product> = passing.iter().map(|p| p.product()).collect();
    let failing: Vec<&Product> = failing.iter().map(|p| p.product()).collect();
    let enabled = |ps: &[&Product], f: &FeatureId| {
        ps.iter()
            .filter(|p| p.config.get(f.as_str()) == Some(true))
            .count() as u64
    };

    let mut features: Vec<FeatureScore> = system
        .features()
        .iter()
        .map(|f| {
            let ef = enabled(&failing, &f.id);
            let ep = enabled(&passing, &f.id);
            let counts = SpectrumCounts::new(ef, ep, failing.len() as u64 - ef, passing.len() as u64 - ep);
            FeatureScore {
                feature: f.id.clone(),
                counts,
                score: metric.score(counts),
                rank: 0,
            }
        })
        .collect();
    features.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.feature.cmp(&b.feature))
    });
    let mut rank = 0;
    let mut prev = None;
    for f in &mut features {
        if prev != Some(f.score) {
            rank += 1;
            prev = Some(f.score);
        }
        f.rank = rank;
    }

    let mut ordered = Vec::with_capacity(system.statements().len());
    for f in &features {
        let owned = system.implementation(f.feature.as_str())?;
        ordered.extend(owned.into_iter().map(|s| (s, f.score)));
    }
    Ok((features, RankedList::from_ordered(ordered)))
}

/// Product-level counts of one statement; exposed for cross-checks.
pub fn statement_product_counts(s: &str, spectra_all: &[ProductSpectra]) -> Result<SpectrumCounts> {
    let (passing, failing) = classify_products(spectra_all)?;
    let passing: Vec<&Product> = passing.iter().map(|p| p.product()).collect();
    let failing: Vec<&Product> = failing.iter().map(|p| p.product()).collect();
    Ok(product_counts(s, &passing, &failing))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::elevator;
    use crate::spectra::TestCase;

    #[test]
    fn technique_names() {
        for t in TechniqueId::ALL {
            assert_eq!(t.name().parse::<TechniqueId>().unwrap(), t);
        }
        assert!("magic".parse::<TechniqueId>().is_err());
    }

    #[test]
    fn sbfl_candidates_are_failed_coverage() {
        let e = elevator();
        let c = sbfl_candidates(&e.spectra).unwrap();
        assert!(c.contains("s31"));
        assert!(!c.contains("s33"));
        assert!(!c.contains("s21"));
        let ranked = sbfl_global(&e.spectra, Metric::Ochiai).unwrap();
        assert_eq!(ranked.len(), c.len());
    }

    #[test]
    fn ssbfl_is_within_sbfl() {
        let e = elevator();
        let s = s_sbfl_candidates(&e.system, &e.spectra).unwrap();
        let g = sbfl_candidates(&e.spectra).unwrap();
        assert!(s.is_subset(&g));
        assert!(s.contains("s31"));
        // s2 and s12 feed `persons`, which the failure at s38 does not depend on.
        assert!(!s.contains("s2"));
    }

    #[test]
    fn ssbfl_requires_failure_points() {
        let e = elevator();
        let mut spectra = e.spectra.clone();
        let p7 = spectra.iter().position(|p| p.product().id == "p7").unwrap();
        let tests: Vec<TestCase> = spectra[p7]
            .tests()
            .iter()
            .cloned()
            .map(|mut t| {
                t.failure_point = None;
                t
            })
            .collect();
        spectra[p7] = ProductSpectra::new(spectra[p7].product().clone(), tests).unwrap();
        let err = s_sbfl(&e.system, &spectra, Metric::Op2).unwrap_err();
        assert!(err.is_precondition());
        assert!(err.to_string().contains("t_overload"), "{err}");
    }

    #[test]
    fn no_failures_is_a_precondition_error() {
        let e = elevator();
        let passing: Vec<_> = e.spectra.iter().filter(|p| !p.is_failing()).cloned().collect();
        assert!(matches!(
            sbfl_global(&passing, Metric::Op2),
            Err(Error::NoFailedTests)
        ));
        assert!(matches!(
            feature_based(&e.system, &passing, Metric::Op2),
            Err(Error::NoFailingProducts)
        ));
    }

    #[test]
    fn feature_ranking_on_elevator() {
        let e = elevator();
        let (features, stmts) = feature_based(&e.system, &e.spectra, Metric::Ochiai).unwrap();
        assert_eq!(features[0].feature.as_str(), "Overloaded");
        assert!((features[0].score - 2.0 / 6f64.sqrt()).abs() < 1e-9);
        let base = features.iter().find(|f| f.feature.as_str() == "Base").unwrap();
        assert_eq!(base.counts, SpectrumCounts::new(2, 5, 0, 0));
        assert_eq!(stmts.len(), e.system.statements().len());
        for f in e.system.features() {
            let scores: BTreeSet<u64> = e
                .system
                .implementation(f.id.as_str())
                .unwrap()
                .iter()
                .map(|s| stmts.get(s.as_str()).unwrap().score.to_bits())
                .collect();
            assert_eq!(scores.len(), 1, "{}", f.id);
        }
        let top: Vec<_> = stmts
            .entries()
            .iter()
            .take(2)
            .map(|e| e.statement.as_str())
            .collect();
        assert_eq!(top, ["s31", "s33"]);
    }
}
