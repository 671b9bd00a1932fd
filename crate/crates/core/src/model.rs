//! Declarative model of a product-line system: features, statements with
//! their owning feature and def/use symbols, configurations and the
//! products they compose.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dependency::DepEdge;
use crate::error::{Error, Result};

macro_rules! id_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(name: impl Into<String>) -> Self {
                Self(name.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }

        impl std::borrow::Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

id_newtype!(
    /// Name of a feature. Compared case-sensitively.
    FeatureId
);
id_newtype!(
    /// Name of a statement. Compared case-sensitively.
    StatementId
);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feature {
    pub id: FeatureId,
    #[serde(default)]
    pub mandatory: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Statement {
    pub id: StatementId,
    pub feature: FeatureId,
    #[serde(default)]
    pub defs: BTreeSet<String>,
    #[serde(default)]
    pub uses: BTreeSet<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintKind {
    Requires,
    Excludes,
}

/// A cross-tree constraint between two features. `requires`: enabling
/// `feature` requires `other`; `excludes`: they are never both enabled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureConstraint {
    pub kind: ConstraintKind,
    pub feature: FeatureId,
    pub other: FeatureId,
}

/// The on/off state of one feature. Orders by feature name, then `false`
/// before `true`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FeatureSelection {
    pub feature: FeatureId,
    pub enabled: bool,
}

impl FeatureSelection {
    pub fn new(feature: impl Into<FeatureId>, enabled: bool) -> Self {
        Self {
            feature: feature.into(),
            enabled,
        }
    }
}

impl fmt::Display for FeatureSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.feature, if self.enabled { "T" } else { "F" })
    }
}

/// A selection for every feature of a system.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Configuration {
    selections: BTreeMap<FeatureId, bool>,
}

impl Configuration {
    pub fn new(selections: BTreeMap<FeatureId, bool>) -> Self {
        Self { selections }
    }

    pub fn get(&self, feature: &str) -> Option<bool> {
        self.selections.get(feature).copied()
    }

    pub fn selections(&self) -> &BTreeMap<FeatureId, bool> {
        &self.selections
    }

    pub fn iter(&self) -> impl Iterator<Item = FeatureSelection> + '_ {
        self.selections
            .iter()
            .map(|(f, &on)| FeatureSelection::new(f.clone(), on))
    }

    pub fn len(&self) -> usize {
        self.selections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selections.is_empty()
    }

    pub fn enabled_features(&self) -> impl Iterator<Item = &FeatureId> {
        self.selections.iter().filter(|(_, &on)| on).map(|(f, _)| f)
    }

    /// True iff every selection of `pc` agrees with this configuration.
    pub fn contains(&self, pc: &PartialConfiguration) -> Result<bool> {
        let mut all = true;
        for (feature, &on) in pc.selections() {
            match self.selections.get(feature) {
                None => return Err(Error::UnknownFeature(feature.to_string())),
                Some(&mine) => all &= mine == on,
            }
        }
        Ok(all)
    }

    /// Selections of `self` that `other` does not share: `{ (f, self(f)) : self(f) != other(f) }`.
    pub fn diff(&self, other: &Configuration) -> Result<BTreeSet<FeatureSelection>> {
        if self.selections.len() != other.selections.len()
            || !self.selections.keys().eq(other.selections.keys())
        {
            return Err(Error::DomainMismatch);
        }
        Ok(self
            .selections
            .iter()
            .zip(other.selections.values())
            .filter(|((_, a), b)| a != b)
            .map(|((f, &a), _)| FeatureSelection::new(f.clone(), a))
            .collect())
    }

    pub fn to_partial(&self) -> Option<PartialConfiguration> {
        PartialConfiguration::from_selections(self.iter()).ok()
    }
}

/// Free-function form of [`Configuration::diff`].
pub fn config_diff(c: &Configuration, c_prime: &Configuration) -> Result<BTreeSet<FeatureSelection>> {
    c.diff(c_prime)
}

/// A non-empty set of feature selections with at most one selection per
/// feature.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<FeatureId, bool>", into = "BTreeMap<FeatureId, bool>")]
pub struct PartialConfiguration {
    selections: BTreeMap<FeatureId, bool>,
}

impl PartialConfiguration {
    pub fn new(selections: BTreeMap<FeatureId, bool>) -> Result<Self> {
        if selections.is_empty() {
            return Err(Error::EmptyPartialConfiguration);
        }
        Ok(Self { selections })
    }

    /// Builds from selections; two conflicting selections of one feature
    /// are rejected.
    pub fn from_selections<I>(iter: I) -> Result<Self>
    where
        I: IntoIterator<Item = FeatureSelection>,
    {
        let mut map = BTreeMap::new();
        for sel in iter {
            if let Some(prev) = map.insert(sel.feature.clone(), sel.enabled) {
                if prev != sel.enabled {
                    return Err(Error::validation(
                        "partial configuration",
                        format!("feature `{}` selected both on and off", sel.feature),
                    ));
                }
            }
        }
        Self::new(map)
    }

    pub fn selections(&self) -> &BTreeMap<FeatureId, bool> {
        &self.selections
    }

    pub fn iter(&self) -> impl Iterator<Item = FeatureSelection> + '_ {
        self.selections
            .iter()
            .map(|(f, &on)| FeatureSelection::new(f.clone(), on))
    }

    pub fn len(&self) -> usize {
        self.selections.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn enabled_features(&self) -> Vec<FeatureId> {
        self.selections
            .iter()
            .filter(|(_, &on)| on)
            .map(|(f, _)| f.clone())
            .collect()
    }

    pub fn disabled_features(&self) -> Vec<FeatureId> {
        self.selections
            .iter()
            .filter(|(_, &on)| !on)
            .map(|(f, _)| f.clone())
            .collect()
    }

    pub fn is_subset_of(&self, other: &PartialConfiguration) -> bool {
        self.selections.len() <= other.selections.len()
            && self
                .selections
                .iter()
                .all(|(f, on)| other.selections.get(f) == Some(on))
    }
}

impl TryFrom<BTreeMap<FeatureId, bool>> for PartialConfiguration {
    type Error = Error;

    fn try_from(map: BTreeMap<FeatureId, bool>) -> Result<Self> {
        Self::new(map)
    }
}

impl From<PartialConfiguration> for BTreeMap<FeatureId, bool> {
    fn from(pc: PartialConfiguration) -> Self {
        pc.selections
    }
}

impl fmt::Display for PartialConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, sel) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{sel}")?;
        }
        f.write_str("}")
    }
}

/// A product-line system: features, their statements and the statement
/// dependency edges. Immutable once built.
#[derive(Debug, Clone)]
pub struct SplSystem {
    features: Vec<Feature>,
    statements: Vec<Statement>,
    dependencies: Vec<DepEdge>,
    constraints: Vec<FeatureConstraint>,
    feature_index: HashMap<FeatureId, usize>,
    statement_index: HashMap<StatementId, usize>,
    owned: Vec<Vec<usize>>,
    pub(crate) succ: Vec<Vec<usize>>,
    pub(crate) pred: Vec<Vec<usize>>,
}

impl SplSystem {
    pub fn new(
        features: Vec<Feature>,
        statements: Vec<Statement>,
        dependencies: Vec<DepEdge>,
        constraints: Vec<FeatureConstraint>,
    ) -> Result<Self> {
        let mut feature_index = HashMap::new();
        for (i, f) in features.iter().enumerate() {
            if f.id.as_str().is_empty() {
                return Err(Error::validation(format!("features[{i}].id"), "empty identifier"));
            }
            if feature_index.insert(f.id.clone(), i).is_some() {
                return Err(Error::validation(
                    format!("features[{i}].id"),
                    format!("duplicate feature `{}`", f.id),
                ));
            }
        }

        let mut statement_index = HashMap::new();
        let mut owned = vec![Vec::new(); features.len()];
        for (i, s) in statements.iter().enumerate() {
            if s.id.as_str().is_empty() {
                return Err(Error::validation(
                    format!("statements[{i}].id"),
                    "empty identifier",
                ));
            }
            if statement_index.insert(s.id.clone(), i).is_some() {
                return Err(Error::validation(
                    format!("statements[{i}].id"),
                    format!("duplicate statement `{}`", s.id),
                ));
            }
            let Some(&fi) = feature_index.get(&s.feature) else {
                return Err(Error::validation(
                    format!("statements[{i}].feature"),
                    format!("unknown feature `{}`", s.feature),
                ));
            };
            owned[fi].push(i);
        }

        let mut succ = vec![Vec::new(); statements.len()];
        let mut pred = vec![Vec::new(); statements.len()];
        let mut seen = std::collections::HashSet::new();
        for (i, e) in dependencies.iter().enumerate() {
            let lookup = |id: &StatementId, field: &str| {
                statement_index.get(id).copied().ok_or_else(|| {
                    Error::validation(
                        format!("dependencies[{i}].{field}"),
                        format!("unknown statement `{id}`"),
                    )
                })
            };
            let from = lookup(&e.from, "from")?;
            let to = lookup(&e.to, "to")?;
            if from == to {
                return Err(Error::validation(
                    format!("dependencies[{i}]"),
                    format!("self-dependency on `{}`", e.from),
                ));
            }
            if !seen.insert((from, to, e.kind)) {
                return Err(Error::validation(
                    format!("dependencies[{i}]"),
                    format!("duplicate edge `{}` -> `{}`", e.from, e.to),
                ));
            }
            if !succ[from].contains(&to) {
                succ[from].push(to);
                pred[to].push(from);
            }
        }
        for list in succ.iter_mut().chain(pred.iter_mut()) {
            list.sort_unstable();
        }

        for (i, c) in constraints.iter().enumerate() {
            for (field, id) in [("feature", &c.feature), ("other", &c.other)] {
                if !feature_index.contains_key(id) {
                    return Err(Error::validation(
                        format!("constraints[{i}].{field}"),
                        format!("unknown feature `{id}`"),
                    ));
                }
            }
        }

        Ok(Self {
            features,
            statements,
            dependencies,
            constraints,
            feature_index,
            statement_index,
            owned,
            succ,
            pred,
        })
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn statements(&self) -> &[Statement] {
        &self.statements
    }

    pub fn dependencies(&self) -> &[DepEdge] {
        &self.dependencies
    }

    pub fn constraints(&self) -> &[FeatureConstraint] {
        &self.constraints
    }

    pub fn feature(&self, id: &str) -> Result<&Feature> {
        self.feature_index
            .get(id)
            .map(|&i| &self.features[i])
            .ok_or_else(|| Error::UnknownFeature(id.to_owned()))
    }

    pub fn statement(&self, id: &str) -> Result<&Statement> {
        self.statement_index(id).map(|i| &self.statements[i])
    }

    pub(crate) fn statement_index(&self, id: &str) -> Result<usize> {
        self.statement_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownStatement(id.to_owned()))
    }

    pub(crate) fn statement_id(&self, idx: usize) -> &StatementId {
        &self.statements[idx].id
    }

    pub(crate) fn owned_indices(&self, feature: &str) -> Result<&[usize]> {
        self.feature_index
            .get(feature)
            .map(|&i| self.owned[i].as_slice())
            .ok_or_else(|| Error::UnknownFeature(feature.to_owned()))
    }

    /// The implementation φ(f) of a feature.
    pub fn implementation(&self, feature: &str) -> Result<BTreeSet<StatementId>> {
        Ok(self
            .owned_indices(feature)?
            .iter()
            .map(|&i| self.statements[i].id.clone())
            .collect())
    }

    /// Checks that `config` selects every feature exactly once and nothing
    /// else.
    pub fn check_domain(&self, config: &Configuration) -> Result<()> {
        for f in config.selections().keys() {
            if !self.feature_index.contains_key(f) {
                return Err(Error::UnknownFeature(f.to_string()));
            }
        }
        for f in &self.features {
            if config.get(f.id.as_str()).is_none() {
                return Err(Error::MissingSelection(f.id.to_string()));
            }
        }
        Ok(())
    }

    /// Domain check plus mandatory features and cross-tree constraints.
    pub fn validate_configuration(&self, config: &Configuration) -> Result<()> {
        self.check_domain(config)?;
        for f in self.features.iter().filter(|f| f.mandatory) {
            if config.get(f.id.as_str()) != Some(true) {
                return Err(Error::validation(
                    "configuration",
                    format!("mandatory feature `{}` is disabled", f.id),
                ));
            }
        }
        for c in &self.constraints {
            let a = config.get(c.feature.as_str()) == Some(true);
            let b = config.get(c.other.as_str()) == Some(true);
            let ok = match c.kind {
                ConstraintKind::Requires => !a || b,
                ConstraintKind::Excludes => !(a && b),
            };
            if !ok {
                return Err(Error::validation(
                    "configuration",
                    format!("violates constraint {:?} `{}` `{}`", c.kind, c.feature, c.other),
                ));
            }
        }
        Ok(())
    }

    /// Composes the product of `config`: the union of the implementations
    /// of all enabled features.
    pub fn compose_product(&self, id: impl Into<String>, config: &Configuration) -> Result<Product> {
        self.check_domain(config)?;
        let mut present = vec![false; self.statements.len()];
        for f in config.enabled_features() {
            for &i in self.owned_indices(f.as_str())? {
                present[i] = true;
            }
        }
        let statements = present
            .iter()
            .enumerate()
            .filter(|(_, &p)| p)
            .map(|(i, _)| self.statements[i].id.clone())
            .collect();
        Ok(Product {
            id: id.into(),
            config: config.clone(),
            statements,
            present,
        })
    }
}

/// A product: a configuration and the statements it is composed of.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Product {
    pub id: String,
    pub config: Configuration,
    pub statements: BTreeSet<StatementId>,
    present: Vec<bool>,
}

impl Product {
    pub fn contains_statement(&self, id: &str) -> bool {
        self.statements.contains(id)
    }

    pub(crate) fn has_index(&self, idx: usize) -> bool {
        self.present.get(idx).copied().unwrap_or(false)
    }

    pub fn contains(&self, pc: &PartialConfiguration) -> Result<bool> {
        self.config.contains(pc)
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

    #[test]
    fn compose_c1_is_base_and_weight() {
        let e = elevator();
        let p1 = e.product("p1");
        let mut expected = e.system.implementation("Base").unwrap();
        expected.extend(e.system.implementation("Weight").unwrap());
        assert_eq!(p1.statements, expected);
    }

    #[test]
    fn compose_all_optional_disabled_gives_mandatory_only() {
        let e = elevator();
        let config = Configuration::new(
            e.system
                .features()
                .iter()
                .map(|f| (f.id.clone(), f.mandatory))
                .collect(),
        );
        let p = e.system.compose_product("base-only", &config).unwrap();
        assert_eq!(p.statements, e.system.implementation("Base").unwrap());
    }

    #[test]
    fn compose_c5_includes_overload_block() {
        let e = elevator();
        let p5 = e.product("p5");
        for s in ["s26", "s27", "s31", "s33"] {
            assert!(p5.contains_statement(s), "{s}");
        }
    }

    #[test]
    fn compose_rejects_unknown_and_missing() {
        let e = elevator();
        let mut map = e.product("p1").config.selections().clone();
        map.insert("Turbo".into(), true);
        assert!(matches!(
            e.system.compose_product("x", &Configuration::new(map.clone())),
            Err(Error::UnknownFeature(_))
        ));
        map.remove("Turbo");
        map.remove("Empty");
        assert!(matches!(
            e.system.compose_product("x", &Configuration::new(map)),
            Err(Error::MissingSelection(_))
        ));
    }

    #[test]
    fn contains_examples() {
        let e = elevator();
        let c7 = &e.product("p7").config;
        let c1 = &e.product("p1").config;
        assert!(c7
            .contains(&pc(&[("TwoThirdsFull", false), ("Overloaded", true)]))
            .unwrap());
        assert!(!c1.contains(&pc(&[("Overloaded", true)])).unwrap());
        assert!(!c1.contains(&pc(&[("Weight", false)])).unwrap());
        assert!(matches!(
            c1.contains(&pc(&[("Turbo", true)])),
            Err(Error::UnknownFeature(_))
        ));
    }

    #[test]
    fn diff_examples() {
        let e = elevator();
        let c = |p: &str| e.product(p).config.clone();
        assert_eq!(
            config_diff(&c("p7"), &c("p1")).unwrap(),
            BTreeSet::from([sel("Overloaded", true)])
        );
        assert_eq!(
            config_diff(&c("p6"), &c("p2")).unwrap(),
            BTreeSet::from([sel("Overloaded", true)])
        );
        assert!(config_diff(&c("p3"), &c("p3")).unwrap().is_empty());
    }

    #[test]
    fn diff_rejects_mismatched_domains() {
        let a = Configuration::new(BTreeMap::from([("A".into(), true)]));
        let b = Configuration::new(BTreeMap::from([("B".into(), true)]));
        assert!(matches!(a.diff(&b), Err(Error::DomainMismatch)));
    }

    #[test]
    fn implementation_partitions_statements() {
        let e = elevator();
        let mut seen = BTreeSet::new();
        for f in e.system.features() {
            for s in e.system.implementation(f.id.as_str()).unwrap() {
                assert!(seen.insert(s));
            }
        }
        assert_eq!(seen.len(), e.system.statements().len());
    }

    #[test]
    fn partial_configuration_rules() {
        assert!(PartialConfiguration::new(BTreeMap::new()).is_err());
        assert!(PartialConfiguration::from_selections([sel("A", true), sel("A", false)]).is_err());
        let small = pc(&[("A", true)]);
        let big = pc(&[("A", true), ("B", false)]);
        assert!(small.is_subset_of(&big));
        assert!(!big.is_subset_of(&small));
        assert_eq!(big.to_string(), "{A=T, B=F}");
    }

    #[test]
    fn system_validation_reports_paths() {
        let feats = vec![Feature {
            id: "A".into(),
            mandatory: true,
        }];
        let stmts = vec![Statement {
            id: "s1".into(),
            feature: "B".into(),
            defs: BTreeSet::new(),
            uses: BTreeSet::new(),
        }];
        let err = SplSystem::new(feats, stmts, vec![], vec![]).unwrap_err();
        assert!(err.to_string().contains("statements[0].feature"), "{err}");
    }

    #[test]
    fn mandatory_and_constraints_are_checked() {
        use crate::dependency::DepKind;
        let feats = vec![
            Feature {
                id: "A".into(),
                mandatory: true,
            },
            Feature {
                id: "B".into(),
                mandatory: false,
            },
            Feature {
                id: "C".into(),
                mandatory: false,
            },
        ];
        let stmt = |id: &str, f: &str| Statement {
            id: id.into(),
            feature: f.into(),
            defs: BTreeSet::new(),
            uses: BTreeSet::new(),
        };
        let sys = SplSystem::new(
            feats,
            vec![stmt("a", "A"), stmt("b", "B")],
            vec![DepEdge::new("a", "b", DepKind::Data)],
            vec![FeatureConstraint {
                kind: ConstraintKind::Excludes,
                feature: "B".into(),
                other: "C".into(),
            }],
        )
        .unwrap();
        let cfg = |a, b, c| {
            Configuration::new(BTreeMap::from([
                ("A".into(), a),
                ("B".into(), b),
                ("C".into(), c),
            ]))
        };
        assert!(sys.validate_configuration(&cfg(true, true, false)).is_ok());
        assert!(sys.validate_configuration(&cfg(false, true, false)).is_err());
        assert!(sys.validate_configuration(&cfg(true, true, true)).is_err());
    }
}
