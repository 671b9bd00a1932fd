//! Product-scoped dependency analysis.
//!
//! A product's dependency graph is the subgraph of the system-level edges
//! induced by the product's statements. On top of it:
//!
//! * [`impact_set`]: statements reachable from `s` (including `s`),
//! * [`feature_impact`]: union of impact sets over a feature's statements,
//! * [`interaction_impl`]: intersection of feature impacts over a feature set,
//! * [`defuse_impact`]: statements reached from symbols a (possibly
//!   disabled) feature defines, closed under dependence,
//! * [`backward_slice`]: statements `s` depends on, transitively.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{FeatureId, Product, SplSystem, StatementId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DepKind {
    Control,
    Data,
}

/// `to` is control- or data-dependent on `from`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DepEdge {
    pub from: StatementId,
    pub to: StatementId,
    pub kind: DepKind,
}

impl DepEdge {
    pub fn new(from: impl Into<StatementId>, to: impl Into<StatementId>, kind: DepKind) -> Self {
        Self {
            from: from.into(),
            to: to.into(),
            kind,
        }
    }
}

/// View of the system dependency graph restricted to one product.
#[derive(Debug, Clone, Copy)]
pub struct ProductDepGraph<'a> {
    system: &'a SplSystem,
    product: &'a Product,
}

impl<'a> ProductDepGraph<'a> {
    pub fn new(system: &'a SplSystem, product: &'a Product) -> Self {
        Self { system, product }
    }

    pub fn product(&self) -> &'a Product {
        self.product
    }

    /// Edges whose endpoints are both in the product.
    pub fn edges(&self) -> impl Iterator<Item = &'a DepEdge> + 'a {
        let product = self.product;
        self.system.dependencies().iter().filter(move |e| {
            product.contains_statement(e.from.as_str()) && product.contains_statement(e.to.as_str())
        })
    }

    fn closure(&self, seeds: impl IntoIterator<Item = usize>, backward: bool) -> Vec<bool> {
        let adj = if backward {
            &self.system.pred
        } else {
            &self.system.succ
        };
        let mut seen = vec![false; adj.len()];
        let mut queue = VecDeque::new();
        for s in seeds {
            if self.product.has_index(s) && !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(n) = queue.pop_front() {
            for &m in &adj[n] {
                if !seen[m] && self.product.has_index(m) {
                    seen[m] = true;
                    queue.push_back(m);
                }
            }
        }
        seen
    }

    fn collect(&self, mask: &[bool]) -> BTreeSet<StatementId> {
        mask.iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| self.system.statement_id(i).clone())
            .collect()
    }

    pub(crate) fn forward_mask(&self, seeds: impl IntoIterator<Item = usize>) -> Vec<bool> {
        self.closure(seeds, false)
    }

    pub(crate) fn backward_mask(&self, seeds: impl IntoIterator<Item = usize>) -> Vec<bool> {
        self.closure(seeds, true)
    }

    pub fn impact_set(&self, s: &str) -> Result<BTreeSet<StatementId>> {
        let idx = self.system.statement_index(s)?;
        Ok(self.collect(&self.forward_mask([idx])))
    }

    pub fn feature_impact(&self, f: &str) -> Result<BTreeSet<StatementId>> {
        let owned = self.system.owned_indices(f)?;
        Ok(self.collect(&self.forward_mask(owned.iter().copied())))
    }

    pub fn interaction_impl<'f, I>(&self, features: I) -> Result<BTreeSet<StatementId>>
    where
        I: IntoIterator<Item = &'f FeatureId>,
    {
        let mut acc: Option<BTreeSet<StatementId>> = None;
        for f in features {
            let alpha = self.feature_impact(f.as_str())?;
            acc = Some(match acc {
                None => alpha,
                Some(prev) => prev.intersection(&alpha).cloned().collect(),
            });
        }
        acc.ok_or_else(|| Error::validation("interaction", "feature set must not be empty"))
    }

    pub fn defuse_impact(&self, f: &str) -> Result<BTreeSet<StatementId>> {
        let defined: BTreeSet<&str> = self
            .system
            .owned_indices(f)?
            .iter()
            .flat_map(|&t| self.system.statements()[t].defs.iter().map(String::as_str))
            .collect();
        let seeds = self
            .system
            .statements()
            .iter()
            .enumerate()
            .filter(|(i, s)| {
                self.product.has_index(*i) && s.uses.iter().any(|u| defined.contains(u.as_str()))
            })
            .map(|(i, _)| i);
        Ok(self.collect(&self.forward_mask(seeds)))
    }

    pub fn backward_slice(&self, s: &str) -> Result<BTreeSet<StatementId>> {
        let idx = self.system.statement_index(s)?;
        if !self.product.has_index(idx) {
            return Err(Error::StatementNotInProduct {
                statement: s.to_owned(),
                product: self.product.id.clone(),
            });
        }
        Ok(self.collect(&self.backward_mask([idx])))
    }
}

/// Ω(s, p): `s` and every statement of `p` transitively dependent on it.
/// Empty when `s` is not in `p`.
pub fn impact_set(system: &SplSystem, s: &str, p: &Product) -> Result<BTreeSet<StatementId>> {
    ProductDepGraph::new(system, p).impact_set(s)
}

/// α(f, p): union of impact sets over the statements of `f`.
pub fn feature_impact(system: &SplSystem, f: &str, p: &Product) -> Result<BTreeSet<StatementId>> {
    ProductDepGraph::new(system, p).feature_impact(f)
}

/// β(F, p): intersection of feature impacts; the features interact in `p`
/// iff the result is non-empty.
pub fn interaction_impl<'f, I>(system: &SplSystem, features: I, p: &Product) -> Result<BTreeSet<StatementId>>
where
    I: IntoIterator<Item = &'f FeatureId>,
{
    ProductDepGraph::new(system, p).interaction_impl(features)
}

/// γ(f, p): statements of `p` using a symbol that some statement of `f`
/// defines, closed under dependence within `p`.
pub fn defuse_impact(system: &SplSystem, f: &str, p: &Product) -> Result<BTreeSet<StatementId>> {
    ProductDepGraph::new(system, p).defuse_impact(f)
}

/// Statements of `p` that `s` transitively depends on, including `s`.
pub fn backward_slice(system: &SplSystem, s: &str, p: &Product) -> Result<BTreeSet<StatementId>> {
    ProductDepGraph::new(system, p).backward_slice(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::elevator;

    fn ids(v: &[&str]) -> BTreeSet<StatementId> {
        v.iter().map(|&s| StatementId::from(s)).collect()
    }

    #[test]
    fn impact_of_s33_in_p5() {
        let e = elevator();
        assert_eq!(
            impact_set(&e.system, "s33", e.product("p5")).unwrap(),
            ids(&["s33", "s36", "s37", "s38"])
        );
    }

    #[test]
    fn impact_is_reflexive_and_empty_outside_product() {
        let e = elevator();
        assert_eq!(
            impact_set(&e.system, "s37", e.product("p7")).unwrap(),
            ids(&["s37"])
        );
        assert!(impact_set(&e.system, "s26", e.product("p7")).unwrap().is_empty());
        assert!(matches!(
            impact_set(&e.system, "s99", e.product("p7")),
            Err(Error::UnknownStatement(_))
        ));
    }

    #[test]
    fn feature_impacts_in_p7() {
        let e = elevator();
        let p7 = e.product("p7");
        assert_eq!(
            feature_impact(&e.system, "Weight", p7).unwrap(),
            ids(&["s9", "s15", "s31", "s33", "s36", "s37", "s38"])
        );
        assert!(feature_impact(&e.system, "TwoThirdsFull", p7).unwrap().is_empty());
        let weight = e.system.implementation("Weight").unwrap();
        assert!(weight.is_subset(&feature_impact(&e.system, "Weight", p7).unwrap()));
    }

    #[test]
    fn interactions() {
        let e = elevator();
        let f = |v: &[&str]| v.iter().map(|&s| FeatureId::from(s)).collect::<Vec<_>>();
        assert_eq!(
            interaction_impl(&e.system, &f(&["Weight", "Overloaded"]), e.product("p7")).unwrap(),
            ids(&["s31", "s33", "s36", "s37", "s38"])
        );
        assert!(
            interaction_impl(&e.system, &f(&["Empty", "Overloaded"]), e.product("p6"))
                .unwrap()
                .is_empty()
        );
        assert_eq!(
            interaction_impl(&e.system, &f(&["Weight"]), e.product("p7")).unwrap(),
            feature_impact(&e.system, "Weight", e.product("p7")).unwrap()
        );
        assert!(interaction_impl(&e.system, &f(&[]), e.product("p7")).is_err());
    }

    #[test]
    fn defuse_of_disabled_features() {
        let e = elevator();
        assert_eq!(
            defuse_impact(&e.system, "TwoThirdsFull", e.product("p7")).unwrap(),
            ids(&["s36", "s37", "s38"])
        );
        assert!(defuse_impact(&e.system, "Weight", e.product("p3"))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn slice_of_s38_in_p7() {
        let e = elevator();
        let slice = backward_slice(&e.system, "s38", e.product("p7")).unwrap();
        assert!(ids(&["s38", "s36", "s33", "s31", "s15", "s9"]).is_subset(&slice));
        assert!(!slice.contains("s27"));
        assert!(backward_slice(&e.system, "s26", e.product("p7")).is_err());
        assert_eq!(
            backward_slice(&e.system, "s2", e.product("p7")).unwrap(),
            ids(&["s2"])
        );
    }

    #[test]
    fn product_graph_edges_are_induced() {
        let e = elevator();
        let g = ProductDepGraph::new(&e.system, e.product("p7"));
        for edge in g.edges() {
            assert!(e.product("p7").contains_statement(edge.from.as_str()));
            assert!(e.product("p7").contains_statement(edge.to.as_str()));
        }
        assert!(g.edges().count() < e.system.dependencies().len());
    }
}
