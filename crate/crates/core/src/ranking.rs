//! Two-dimensional suspiciousness: a product-based score `ps` treating each
//! sampled product as one test, and a test-case-based score `ts`
//! aggregating per-product local scores. Both are min-max normalized over
//! the suspicious space and combined as `w * ps + (1 - w) * ts`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::isolation::SuspiciousSpace;
use crate::metrics::Metric;
use crate::model::{Product, StatementId};
use crate::spectra::{classify_products, count_spectrum, ProductSpectra, SpectrumCounts};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregation {
    #[default]
    Mean,
    Geometric,
    Max,
    Min,
    Median,
}

impl Aggregation {
    pub const ALL: [Aggregation; 5] = [
        Aggregation::Mean,
        Aggregation::Geometric,
        Aggregation::Max,
        Aggregation::Min,
        Aggregation::Median,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Aggregation::Mean => "mean",
            Aggregation::Geometric => "geometric",
            Aggregation::Max => "max",
            Aggregation::Min => "min",
            Aggregation::Median => "median",
        }
    }

    /// Aggregates in the given order. Empty input gives 0. The geometric
    /// mean is 0 as soon as one value is not positive.
    pub fn apply(self, values: &[f64]) -> f64 {
        if values.is_empty() {
            return 0.0;
        }
        let n = values.len() as f64;
        match self {
            Aggregation::Mean => values.iter().sum::<f64>() / n,
            Aggregation::Geometric => {
                if values.iter().any(|&v| v <= 0.0) {
                    0.0
                } else {
                    (values.iter().map(|v| v.ln()).sum::<f64>() / n).exp()
                }
            }
            Aggregation::Max => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Aggregation::Min => values.iter().copied().fold(f64::INFINITY, f64::min),
            Aggregation::Median => {
                let mut v = values.to_vec();
                v.sort_by(f64::total_cmp);
                let mid = v.len() / 2;
                if v.len() % 2 == 1 {
                    v[mid]
                } else {
                    (v[mid - 1] + v[mid]) / 2.0
                }
            }
        }
    }
}

impl fmt::Display for Aggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Aggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|a| a.name() == lower)
            .ok_or_else(|| Error::UnknownOption {
                kind: "aggregation",
                value: s.to_owned(),
            })
    }
}

/// How local (per-product) scores are scaled before aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    #[default]
    MinMax,
    None,
}

impl Normalization {
    pub fn name(self) -> &'static str {
        match self {
            Normalization::MinMax => "minmax",
            Normalization::None => "none",
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "minmax" => Ok(Normalization::MinMax),
            "none" => Ok(Normalization::None),
            _ => Err(Error::UnknownOption {
                kind: "normalization",
                value: s.to_owned(),
            }),
        }
    }
}

pub const DEFAULT_WEIGHT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankingConfig {
    pub metric: Metric,
    pub weight: f64,
    pub aggregation: Aggregation,
    pub normalization: Normalization,
}

impl Default for RankingConfig {
    fn default() -> Self {
        Self {
            metric: Metric::Op2,
            weight: DEFAULT_WEIGHT,
            aggregation: Aggregation::Mean,
            normalization: Normalization::MinMax,
        }
    }
}

impl RankingConfig {
    pub fn validate(&self) -> Result<()> {
        check_weight(self.weight)
    }
}

fn check_weight(w: f64) -> Result<()> {
    if (0.0..=1.0).contains(&w) {
        Ok(())
    } else {
        Err(Error::InvalidWeight(w))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedEntry {
    pub statement: StatementId,
    pub score: f64,
    pub rank: usize,
}

/// Statements in descending score order. Equal scores share a rank and
/// ranks are contiguous from 1.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RankedList {
    entries: Vec<RankedEntry>,
}

impl RankedList {
    /// Sorts by score descending, then statement id ascending.
    pub fn from_scored(mut scored: Vec<(StatementId, f64)>) -> Self {
        scored.sort_by(|a, b| by_score_desc(a.1, b.1).then_with(|| a.0.cmp(&b.0)));
        Self::from_ordered(scored)
    }

    /// Keeps the given order and assigns ranks, starting a new rank
    /// whenever the score changes.
    pub fn from_ordered(ordered: Vec<(StatementId, f64)>) -> Self {
        let mut entries = Vec::with_capacity(ordered.len());
        let mut rank = 0;
        let mut prev: Option<f64> = None;
        for (statement, score) in ordered {
            if prev != Some(score) {
                rank += 1;
                prev = Some(score);
            }
            entries.push(RankedEntry {
                statement,
                score,
                rank,
            });
        }
        Self { entries }
    }

    pub fn entries(&self) -> &[RankedEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn statements(&self) -> impl Iterator<Item = &StatementId> {
        self.entries.iter().map(|e| &e.statement)
    }

    pub fn get(&self, s: &str) -> Option<&RankedEntry> {
        self.entries.iter().find(|e| e.statement.as_str() == s)
    }
}

fn by_score_desc(a: f64, b: f64) -> Ordering {
    b.total_cmp(&a)
}

/// Min-max normalization; a zero range maps every value to 0.5.
pub fn min_max(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    values
        .iter()
        .map(|&v| if range > 0.0 { (v - lo) / range } else { 0.5 })
        .collect()
}

/// Counts for `s` with products as tests: a failing product containing `s`
/// is a failed test executing it, and so on.
pub fn product_counts(s: &str, passing: &[&Product], failing: &[&Product]) -> SpectrumCounts {
    let hits = |ps: &[&Product]| ps.iter().filter(|p| p.contains_statement(s)).count() as u64;
    let ef = hits(failing);
    let ep = hits(passing);
    SpectrumCounts::new(ef, ep, failing.len() as u64 - ef, passing.len() as u64 - ep)
}

/// ps(s, M), before normalization.
pub fn product_based_score(s: &str, passing: &[&Product], failing: &[&Product], metric: Metric) -> f64 {
    metric.score(product_counts(s, passing, failing))
}

/// Local scores of one product over a scope of statements, scaled
/// according to `norm`. Statements of the scope absent from the product
/// are skipped.
pub fn local_scores(
    spectra: &ProductSpectra,
    scope: &BTreeSet<StatementId>,
    metric: Metric,
    norm: Normalization,
) -> Result<BTreeMap<StatementId, f64>> {
    let ids: Vec<&StatementId> = scope
        .iter()
        .filter(|s| spectra.product().contains_statement(s.as_str()))
        .collect();
    let raw = ids
        .iter()
        .map(|s| Ok(metric.score(count_spectrum(spectra, s.as_str())?)))
        .collect::<Result<Vec<f64>>>()?;
    let scaled = match norm {
        Normalization::MinMax => min_max(&raw),
        Normalization::None => raw,
    };
    Ok(ids.into_iter().cloned().zip(scaled).collect())
}

/// ts(s, M), before normalization: local scores of `s` in each failing
/// product containing it, aggregated in product-id order. Each product's
/// local scores are scaled over `scope` (plus `s` itself). Zero when no
/// failing product contains `s`.
pub fn testcase_based_score(
    s: &str,
    failing: &[&ProductSpectra],
    scope: &BTreeSet<StatementId>,
    cfg: &RankingConfig,
) -> Result<f64> {
    let mut failing = failing.to_vec();
    failing.sort_by(|a, b| a.product().id.cmp(&b.product().id));
    let mut scope = scope.clone();
    scope.insert(StatementId::from(s));
    let mut locals = Vec::new();
    for p in failing {
        if !p.product().contains_statement(s) {
            continue;
        }
        let scores = local_scores(p, &scope, cfg.metric, cfg.normalization)?;
        locals.push(scores[s]);
    }
    Ok(cfg.aggregation.apply(&locals))
}

pub fn combine(ps: f64, ts: f64, w: f64) -> Result<f64> {
    check_weight(w)?;
    Ok(w * ps + (1.0 - w) * ts)
}

/// Score components of one statement of the suspicious space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredStatement {
    pub statement: StatementId,
    pub ps_raw: f64,
    pub ts_raw: f64,
    pub ps: f64,
    pub ts: f64,
    pub score: f64,
}

/// Computes ps and ts for every statement of the space, normalizes each
/// over the space and combines them. Output is in statement-id order.
pub fn score_space(
    space: &SuspiciousSpace,
    spectra_all: &[ProductSpectra],
    cfg: &RankingConfig,
) -> Result<Vec<ScoredStatement>> {
    cfg.validate()?;
    let (passing, failing) = classify_products(spectra_all)?;
    let pass_products: Vec<&Product> = passing.iter().map(|p| p.product()).collect();
    let fail_products: Vec<&Product> = failing.iter().map(|p| p.product()).collect();
    let scope: BTreeSet<StatementId> = space.ids().cloned().collect();

    let mut fail_sorted = failing.clone();
    fail_sorted.sort_by(|a, b| a.product().id.cmp(&b.product().id));
    let locals = fail_sorted
        .iter()
        .map(|p| local_scores(p, &scope, cfg.metric, cfg.normalization))
        .collect::<Result<Vec<_>>>()?;

    let ids: Vec<&StatementId> = space.ids().collect();
    let ps_raw: Vec<f64> = ids
        .iter()
        .map(|s| product_based_score(s.as_str(), &pass_products, &fail_products, cfg.metric))
        .collect();
    let ts_raw: Vec<f64> = ids
        .iter()
        .map(|s| {
            let vals: Vec<f64> = locals.iter().filter_map(|m| m.get(s.as_str()).copied()).collect();
            cfg.aggregation.apply(&vals)
        })
        .collect();
    let ps = min_max(&ps_raw);
    let ts = min_max(&ts_raw);
    ids.into_iter()
        .enumerate()
        .map(|(i, s)| {
            Ok(ScoredStatement {
                statement: s.clone(),
                ps_raw: ps_raw[i],
                ts_raw: ts_raw[i],
                ps: ps[i],
                ts: ts[i],
                score: combine(ps[i], ts[i], cfg.weight)?,
            })
        })
        .collect()
}

pub fn rank_suspicious(
    space: &SuspiciousSpace,
    spectra_all: &[ProductSpectra],
    cfg: &RankingConfig,
) -> Result<RankedList> {
    let scored = score_space(space, spectra_all, cfg)?;
    Ok(RankedList::from_scored(
        scored.into_iter().map(|s| (s.statement, s.score)).collect(),
    ))
}
