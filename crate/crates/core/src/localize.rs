//! End-to-end localization over a loaded dataset, for every technique.

use std::collections::BTreeMap;

use crate::baselines::{feature_based, s_sbfl, sbfl_global, FeatureScore, TechniqueId};
use crate::bpc::{detect_spcs, SuspiciousPc, DEFAULT_K};
use crate::error::{Error, Result};
use crate::io::{Dataset, FeatureEntryOut, RankedFile, RunManifest, TOOL_VERSION};
use crate::isolation::{suspicious_space, SuspiciousSpace};
use crate::model::Product;
use crate::ranking::{rank_suspicious, RankedList, RankingConfig};
use crate::spectra::classify_products;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizeOptions {
    pub technique: TechniqueId,
    pub ranking: RankingConfig,
    pub max_interaction: usize,
    pub include_forward: bool,
}

impl Default for LocalizeOptions {
    fn default() -> Self {
        Self {
            technique: TechniqueId::VarCop,
            ranking: RankingConfig::default(),
            max_interaction: DEFAULT_K,
            include_forward: false,
        }
    }
}

impl LocalizeOptions {
    pub fn validate(&self) -> Result<()> {
        self.ranking.validate()?;
        if self.max_interaction < 1 {
            return Err(Error::InvalidInteractionSize(self.max_interaction));
        }
        Ok(())
    }

    pub fn manifest(&self, inputs: BTreeMap<String, String>) -> RunManifest {
        RunManifest {
            technique: self.technique.to_string(),
            metric: self.ranking.metric.to_string(),
            weight: self.ranking.weight,
            aggregation: self.ranking.aggregation.to_string(),
            normalization: self.ranking.normalization.to_string(),
            max_interaction: self.max_interaction,
            include_forward: self.include_forward,
            inputs,
            tool_version: TOOL_VERSION.to_owned(),
            seed: None,
            fallback: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Localization {
    pub ranked: RankedList,
    /// Feature ranking, for the feature-based technique.
    pub features: Option<Vec<FeatureScore>>,
    /// VarCop only: detected SPCs and the suspicious space.
    pub spcs: Vec<SuspiciousPc>,
    pub space: Option<SuspiciousSpace>,
    /// VarCop found nothing to isolate and fell back to global SBFL.
    pub fallback: bool,
}

impl Localization {
    pub fn to_file(&self, mut manifest: RunManifest) -> RankedFile {
        manifest.fallback = self.fallback;
        let mut file = RankedFile::new(manifest, &self.ranked);
        file.features = self.features.as_ref().map(|fs| {
            fs.iter()
                .map(|f| FeatureEntryOut {
                    feature: f.feature.clone(),
                    score: crate::io::round_sig(f.score),
                    rank: f.rank,
                })
                .collect()
        });
        file
    }
}

/// SPC detection over the dataset's passing and failing products.
pub fn detect(dataset: &Dataset, k: usize) -> Result<Vec<SuspiciousPc>> {
    let (passing, failing) = classify_products(&dataset.spectra)?;
    let passing: Vec<&Product> = passing.iter().map(|p| p.product()).collect();
    let failing: Vec<&Product> = failing.iter().map(|p| p.product()).collect();
    if failing.is_empty() {
        return Err(Error::NoFailingProducts);
    }
    detect_spcs(&passing, &failing, k)
}

pub fn varcop(dataset: &Dataset, opts: &LocalizeOptions) -> Result<Localization> {
    let spcs = detect(dataset, opts.max_interaction)?;
    let space = suspicious_space(&dataset.system, &dataset.spectra, &spcs, opts.include_forward)?;
    if space.is_empty() {
        log::warn!("suspicious space is empty; falling back to global SBFL");
        return Ok(Localization {
            ranked: sbfl_global(&dataset.spectra, opts.ranking.metric)?,
            features: None,
            spcs,
            space: Some(space),
            fallback: true,
        });
    }
    let ranked = rank_suspicious(&space, &dataset.spectra, &opts.ranking)?;
    Ok(Localization {
        ranked,
        features: None,
        spcs,
        space: Some(space),
        fallback: false,
    })
}

pub fn localize(dataset: &Dataset, opts: &LocalizeOptions) -> Result<Localization> {
    opts.validate()?;
    let plain = |ranked| Localization {
        ranked,
        features: None,
        spcs: Vec::new(),
        space: None,
        fallback: false,
    };
    let metric = opts.ranking.metric;
    match opts.technique {
        TechniqueId::VarCop => varcop(dataset, opts),
        TechniqueId::Sbfl => Ok(plain(sbfl_global(&dataset.spectra, metric)?)),
        TechniqueId::SSbfl => Ok(plain(s_sbfl(&dataset.system, &dataset.spectra, metric)?)),
        TechniqueId::FeatureBased => {
            let (features, ranked) = feature_based(&dataset.system, &dataset.spectra, metric)?;
            Ok(Localization {
                features: Some(features),
                ..plain(ranked)
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::{evaluate, exam};
    use crate::fixtures::elevator;

    #[test]
    fn varcop_on_elevator() {
        let e = elevator();
        let out = localize(&e, &LocalizeOptions::default()).unwrap();
        assert!(!out.fallback);
        assert_eq!(out.spcs.len(), 2);
        assert_eq!(out.ranked.entries()[0].statement.as_str(), "s31");
        let report = evaluate(&out.ranked, &e.truth);
        assert_eq!(report.best_rank, Some(1));
        assert!(report.hit_at[&1]);
        assert!((exam(&out.ranked, &e.truth).percent - 100.0 / 6.0).abs() < 1e-9);
    }

    #[test]
    fn every_technique_runs() {
        let e = elevator();
        for technique in TechniqueId::ALL {
            let opts = LocalizeOptions {
                technique,
                ..LocalizeOptions::default()
            };
            let out = localize(&e, &opts).unwrap();
            assert!(!out.ranked.is_empty(), "{technique}");
            assert_eq!(out.features.is_some(), technique == TechniqueId::FeatureBased);
        }
    }

    #[test]
    fn options_are_validated() {
        let e = elevator();
        let mut opts = LocalizeOptions {
            max_interaction: 0,
            ..Default::default()
        };
        assert!(matches!(
            localize(&e, &opts),
            Err(Error::InvalidInteractionSize(0))
        ));
        opts.max_interaction = 7;
        opts.ranking.weight = 1.5;
        assert!(matches!(localize(&e, &opts), Err(Error::InvalidWeight(_))));
    }

    #[test]
    fn falls_back_when_nothing_is_isolated() {
        let e = elevator();
        // With K = 1 no SPC exists on the fixture.
        let opts = LocalizeOptions {
            max_interaction: 1,
            ..LocalizeOptions::default()
        };
        let out = localize(&e, &opts).unwrap();
        assert!(out.fallback);
        assert!(out.spcs.is_empty());
        let file = out.to_file(opts.manifest(BTreeMap::new()));
        assert!(file.manifest.fallback);
    }
}
