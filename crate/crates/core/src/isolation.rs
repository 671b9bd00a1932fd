//! Isolation of suspicious statements from a suspicious partial
//! configuration and a failing product.
//!
//! The interaction core is what the enabled features of the SPC jointly
//! impact, narrowed by what its disabled features could have influenced
//! through shared symbols. Suspicious statements are those implementing or
//! impacting the core that some failed test of the product executed.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::bpc::SuspiciousPc;
use crate::dependency::ProductDepGraph;
use crate::error::{Error, Result};
use crate::model::{PartialConfiguration, Product, SplSystem, StatementId};
use crate::spectra::ProductSpectra;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsolationResult {
    pub product: String,
    pub spc: PartialConfiguration,
    pub core: BTreeSet<StatementId>,
    pub candidates: BTreeSet<StatementId>,
    pub suspicious: BTreeSet<StatementId>,
}

fn intersect(a: BTreeSet<StatementId>, b: &BTreeSet<StatementId>) -> BTreeSet<StatementId> {
    a.into_iter().filter(|s| b.contains(s)).collect()
}

/// β(F_E, p) ∩ ⋂ γ(f_d, p). With no disabled feature this is β(F_E, p);
/// with no enabled feature it is the intersection of the γ sets alone.
pub fn interaction_core(
    system: &SplSystem,
    spc: &PartialConfiguration,
    p: &Product,
) -> Result<BTreeSet<StatementId>> {
    if !p.contains(spc)? {
        return Err(Error::NotContained {
            spc: spc.to_string(),
            product: p.id.clone(),
        });
    }
    let g = ProductDepGraph::new(system, p);
    let enabled = spc.enabled_features();
    let mut core = if enabled.is_empty() {
        None
    } else {
        Some(g.interaction_impl(&enabled)?)
    };
    for f in spc.disabled_features() {
        let gamma = g.defuse_impact(f.as_str())?;
        core = Some(match core {
            None => gamma,
            Some(c) => intersect(c, &gamma),
        });
    }
    // A partial configuration is non-empty, so one of the two loops ran.
    Ok(core.unwrap_or_default())
}

/// Suspicious statements of `spc` in the product of `spectra`.
///
/// Candidates are the core plus every statement whose impact set meets it;
/// with `include_forward`, statements the core impacts are added as well.
/// The result keeps the candidates executed by a failed test.
pub fn suspicious_statements(
    system: &SplSystem,
    spc: &PartialConfiguration,
    spectra: &ProductSpectra,
    include_forward: bool,
) -> Result<IsolationResult> {
    let p = spectra.product();
    let core = interaction_core(system, spc, p)?;
    let g = ProductDepGraph::new(system, p);
    let seeds = core
        .iter()
        .map(|s| system.statement_index(s.as_str()))
        .collect::<Result<Vec<_>>>()?;
    let mut mask = g.backward_mask(seeds.iter().copied());
    if include_forward {
        for (m, f) in mask.iter_mut().zip(g.forward_mask(seeds.iter().copied())) {
            *m |= f;
        }
    }
    let candidates: BTreeSet<StatementId> = mask
        .iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(i, _)| system.statement_id(i).clone())
        .collect();
    let covered = spectra.failed_coverage();
    let suspicious = candidates
        .iter()
        .filter(|s| covered.contains(*s))
        .cloned()
        .collect();
    Ok(IsolationResult {
        product: p.id.clone(),
        spc: spc.clone(),
        core,
        candidates,
        suspicious,
    })
}

/// One (failing product, SPC) pair that isolated a statement.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Evidence {
    pub product: String,
    pub spc: PartialConfiguration,
}

/// Union of the suspicious statements over every failing product and every
/// SPC it contains.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SuspiciousSpace {
    pub statements: BTreeMap<StatementId, BTreeSet<Evidence>>,
    pub results: Vec<IsolationResult>,
}

impl SuspiciousSpace {
    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn contains(&self, s: &str) -> bool {
        self.statements.contains_key(s)
    }

    pub fn ids(&self) -> impl Iterator<Item = &StatementId> {
        self.statements.keys()
    }
}

pub fn suspicious_space(
    system: &SplSystem,
    spectra_all: &[ProductSpectra],
    spcs: &[SuspiciousPc],
    include_forward: bool,
) -> Result<SuspiciousSpace> {
    let mut failing: Vec<&ProductSpectra> = spectra_all.iter().filter(|p| p.is_failing()).collect();
    failing.sort_by(|a, b| a.product().id.cmp(&b.product().id));
    let mut space = SuspiciousSpace::default();
    for ps in failing {
        for spc in spcs {
            if !ps.product().contains(&spc.selections)? {
                continue;
            }
            let r = suspicious_statements(system, &spc.selections, ps, include_forward)?;
            for s in &r.suspicious {
                space.statements.entry(s.clone()).or_default().insert(Evidence {
                    product: r.product.clone(),
                    spc: spc.selections.clone(),
                });
            }
            space.results.push(r);
        }
    }
    Ok(space)
}
