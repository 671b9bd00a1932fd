//! JSON file formats and loading of a cross-validated dataset.
//!
//! * system:   `{features:[{id,mandatory}], statements:[{id,feature,defs,uses}], dependencies:[{from,to,kind}], constraints?:[{kind,feature,other}]}`
//! * products: `{products:[{id, config:{feature: bool, ...}}]}`
//! * spectra:  `{spectra:[{product, tests:[{id, outcome, covered, failure_point?}]}]}`
//! * truth:    `{buggy:[ids]}`
//! * ranked:   `{manifest, entries:[{statement, score, rank}], features?:[...]}`

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::dependency::DepEdge;
use crate::error::{Error, Result};
use crate::evaluation::GroundTruth;
use crate::model::{
    Configuration, Feature, FeatureConstraint, FeatureId, Product, SplSystem, Statement, StatementId,
};
use crate::ranking::RankedList;
use crate::spectra::{ProductSpectra, TestCase};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub features: Vec<Feature>,
    pub statements: Vec<Statement>,
    #[serde(default)]
    pub dependencies: Vec<DepEdge>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<FeatureConstraint>,
}

impl SystemFile {
    pub fn from_system(system: &SplSystem) -> Self {
        Self {
            features: system.features().to_vec(),
            statements: system.statements().to_vec(),
            dependencies: system.dependencies().to_vec(),
            constraints: system.constraints().to_vec(),
        }
    }

    pub fn into_system(self) -> Result<SplSystem> {
        SplSystem::new(
            self.features,
            self.statements,
            self.dependencies,
            self.constraints,
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductEntry {
    pub id: String,
    pub config: BTreeMap<FeatureId, bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductsFile {
    pub products: Vec<ProductEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectraEntry {
    pub product: String,
    pub tests: Vec<TestCase>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectraFile {
    pub spectra: Vec<SpectraEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthFile {
    pub buggy: Vec<StatementId>,
}

/// Settings and inputs of a run, echoed into every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub technique: String,
    pub metric: String,
    pub weight: f64,
    pub aggregation: String,
    pub normalization: String,
    pub max_interaction: usize,
    pub include_forward: bool,
    pub inputs: BTreeMap<String, String>,
    pub tool_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntryOut {
    pub statement: StatementId,
    pub score: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureEntryOut {
    pub feature: FeatureId,
    pub score: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFile {
    pub manifest: RunManifest,
    pub entries: Vec<RankedEntryOut>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features: Option<Vec<FeatureEntryOut>>,
}

impl RankedFile {
    pub fn new(manifest: RunManifest, list: &RankedList) -> Self {
        Self {
            manifest,
            entries: list
                .entries()
                .iter()
                .map(|e| RankedEntryOut {
                    statement: e.statement.clone(),
                    score: round_sig(e.score),
                    rank: e.rank,
                })
                .collect(),
            features: None,
        }
    }

    /// Rebuilds a ranked list from the serialized entries (order and scores
    /// as written).
    pub fn to_ranked_list(&self) -> RankedList {
        RankedList::from_ordered(
            self.entries
                .iter()
                .map(|e| (e.statement.clone(), e.score))
                .collect(),
        )
    }
}

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// A loaded system together with its sampled products and their spectra.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub system: SplSystem,
    pub products: Vec<Product>,
    pub spectra: Vec<ProductSpectra>,
}

impl Dataset {
    /// Cross-validates the three files: product ids are unique, every
    /// configuration is valid for the system, and every product has exactly
    /// one spectra record.
    pub fn from_parts(system: SystemFile, products: ProductsFile, spectra: SpectraFile) -> Result<Self> {
        let system = system.into_system()?;
        let mut built = Vec::with_capacity(products.products.len());
        let mut by_id = HashMap::new();
        for (i, entry) in products.products.into_iter().enumerate() {
            let path = format!("products[{i}]");
            if entry.id.is_empty() {
                return Err(Error::validation(format!("{path}.id"), "empty identifier"));
            }
            if by_id.insert(entry.id.clone(), i).is_some() {
                return Err(Error::validation(
                    format!("{path}.id"),
                    format!("duplicate product `{}`", entry.id),
                ));
            }
            let config = Configuration::new(entry.config);
            system
                .validate_configuration(&config)
                .map_err(|e| Error::validation(format!("{path}.config"), e.to_string()))?;
            built.push(system.compose_product(entry.id, &config)?);
        }

        let mut slots: Vec<Option<ProductSpectra>> = vec![None; built.len()];
        for (i, entry) in spectra.spectra.into_iter().enumerate() {
            let Some(&pi) = by_id.get(&entry.product) else {
                return Err(Error::validation(
                    format!("spectra[{i}].product"),
                    format!("unknown product `{}`", entry.product),
                ));
            };
            if slots[pi].is_some() {
                return Err(Error::validation(
                    format!("spectra[{i}].product"),
                    format!("duplicate spectra for product `{}`", entry.product),
                ));
            }
            for (ti, t) in entry.tests.iter().enumerate() {
                let known = |s: &StatementId| system.statement(s.as_str()).is_ok();
                if let Some(s) = t.covered.iter().chain(t.failure_point.iter()).find(|s| !known(s)) {
                    return Err(Error::validation(
                        format!("spectra[{i}].tests[{ti}]"),
                        format!("unknown statement `{s}`"),
                    ));
                }
            }
            slots[pi] = Some(ProductSpectra::new(built[pi].clone(), entry.tests)?);
        }
        let spectra = slots
            .into_iter()
            .zip(&built)
            .map(|(s, p)| {
                s.ok_or_else(|| Error::validation("spectra", format!("no spectra for product `{}`", p.id)))
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(Self {
            system,
            products: built,
            spectra,
        })
    }

    pub fn from_json_strs(system: &str, products: &str, spectra: &str) -> Result<Self> {
        Self::from_parts(
            parse_json("system", system)?,
            parse_json("products", products)?,
            parse_json("spectra", spectra)?,
        )
    }

    pub fn load(system: &Path, products: &Path, spectra: &Path) -> Result<Self> {
        Self::from_parts(read_json(system)?, read_json(products)?, read_json(spectra)?)
    }

    pub fn product(&self, id: &str) -> Option<&Product> {
        self.products.iter().find(|p| p.id == id)
    }

    pub fn spectra_of(&self, id: &str) -> Option<&ProductSpectra> {
        self.spectra.iter().find(|s| s.product().id == id)
    }

    pub fn to_files(&self) -> (SystemFile, ProductsFile, SpectraFile) {
        let products = ProductsFile {
            products: self
                .products
                .iter()
                .map(|p| ProductEntry {
                    id: p.id.clone(),
                    config: p.config.selections().clone(),
                })
                .collect(),
        };
        let spectra = SpectraFile {
            spectra: self
                .spectra
                .iter()
                .map(|s| SpectraEntry {
                    product: s.product().id.clone(),
                    tests: s.tests().to_vec(),
                })
                .collect(),
        };
        (SystemFile::from_system(&self.system), products, spectra)
    }
}

/// Parses a truth file and checks every id against the system.
pub fn ground_truth(system: &SplSystem, truth: TruthFile) -> Result<GroundTruth> {
    for (i, s) in truth.buggy.iter().enumerate() {
        if system.statement(s.as_str()).is_err() {
            return Err(Error::validation(
                format!("buggy[{i}]"),
                format!("unknown statement `{s}`"),
            ));
        }
    }
    GroundTruth::new(truth.buggy.into_iter().collect::<BTreeSet<_>>())
}

pub fn parse_json<T: DeserializeOwned>(what: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|source| Error::Json {
        path: what.to_owned(),
        source,
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_json(&path.display().to_string(), &text)
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json_string(value)).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}
