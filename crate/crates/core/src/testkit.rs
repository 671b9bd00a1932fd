//! Seeded generator of small product-line cases and brute-force oracles.
//!
//! A generated case has a mandatory `Base` feature and optional features
//! `F1..`, statements `s0..` with random owners, and acyclic dependency
//! edges pointing from lower to higher index. A product fails exactly when
//! its configuration contains the seeded buggy partial configuration; in
//! such a product at least one test executes the buggy statement, and a
//! test fails iff it does.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bpc::SuspiciousPc;
use crate::dependency::{impact_set, DepEdge, DepKind};
use crate::error::{Error, Result};
use crate::evaluation::GroundTruth;
use crate::io::Dataset;
use crate::model::{
    Configuration, Feature, FeatureId, FeatureSelection, PartialConfiguration, Product, SplSystem, Statement,
    StatementId,
};
use crate::spectra::{Outcome, ProductSpectra, TestCase};

pub const ORACLE_MAX_FEATURES: usize = 12;
const MAX_ATTEMPTS: u32 = 64;

/// The buggy partial configuration to seed.
#[derive(Debug, Clone, PartialEq)]
pub enum BugSpec {
    /// A random one with this many selections over optional features.
    Random {
        pc_size: usize,
    },
    Fixed(PartialConfiguration),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    /// Total features, `Base` included.
    pub n_features: usize,
    pub n_statements: usize,
    /// Probability of an edge between two statements.
    pub edge_density: f64,
    pub n_products: usize,
    pub tests_per_product: usize,
    pub seed: u64,
    pub bug: BugSpec,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        Self {
            n_features: 5,
            n_statements: 20,
            edge_density: 0.15,
            n_products: 8,
            tests_per_product: 4,
            seed: 0,
            bug: BugSpec::Random { pc_size: 2 },
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedCase {
    pub dataset: Dataset,
    pub truth: GroundTruth,
    pub buggy_pc: PartialConfiguration,
    pub buggy_statement: StatementId,
    pub seed: u64,
}

impl GeneratedCase {
    pub fn passing_products(&self) -> Vec<&Product> {
        self.dataset
            .spectra
            .iter()
            .filter(|s| !s.is_failing())
            .map(|s| s.product())
            .collect()
    }

    pub fn failing_products(&self) -> Vec<&Product> {
        self.dataset
            .spectra
            .iter()
            .filter(|s| s.is_failing())
            .map(|s| s.product())
            .collect()
    }
}

fn check_spec(spec: &GeneratorSpec) -> Result<()> {
    let infeasible = |m: &str| Err(Error::Infeasible(m.to_owned()));
    if spec.n_features < 2 {
        return infeasible("need at least one optional feature besides Base");
    }
    if spec.n_statements < spec.n_features {
        return infeasible("every feature needs at least one statement");
    }
    if spec.n_products < 2 {
        return infeasible("a variability bug needs a passing and a failing product");
    }
    if spec.tests_per_product < 1 {
        return infeasible("every product needs a test");
    }
    if !(0.0..=1.0).contains(&spec.edge_density) {
        return infeasible("edge density must lie in [0, 1]");
    }
    match &spec.bug {
        BugSpec::Random { pc_size } => {
            if *pc_size < 1 || *pc_size > spec.n_features - 1 {
                return infeasible(
                    "buggy configuration size must be between 1 and the optional feature count",
                );
            }
        }
        BugSpec::Fixed(pc) => {
            for sel in pc.iter() {
                let known = sel.feature.as_str() == "Base"
                    || optional_index(sel.feature.as_str(), spec.n_features).is_some();
                if !known {
                    return infeasible(&format!(
                        "buggy configuration names unknown feature `{}`",
                        sel.feature
                    ));
                }
                if sel.feature.as_str() == "Base" && !sel.enabled {
                    return infeasible("Base is mandatory and cannot be disabled");
                }
            }
        }
    }
    Ok(())
}

fn optional_index(name: &str, n_features: usize) -> Option<usize> {
    let i: usize = name.strip_prefix('F')?.parse().ok()?;
    (1..n_features).contains(&i).then_some(i)
}

fn feature_name(i: usize) -> FeatureId {
    if i == 0 {
        FeatureId::from("Base")
    } else {
        FeatureId::from(format!("F{i}"))
    }
}

/// Generates a case. The same spec always yields the same case; when a
/// draw does not produce a variability bug, generation retries with seeds
/// derived from the original one.
pub fn generate_system(spec: &GeneratorSpec) -> Result<GeneratedCase> {
    check_spec(spec)?;
    let mut master = ChaCha8Rng::seed_from_u64(spec.seed);
    for _ in 0..MAX_ATTEMPTS {
        let sub = master.gen::<u64>();
        if let Some(case) = attempt(spec, &mut ChaCha8Rng::seed_from_u64(sub))? {
            return Ok(case);
        }
    }
    Err(Error::Infeasible(format!(
        "no variability bug after {MAX_ATTEMPTS} attempts for seed {}",
        spec.seed
    )))
}

fn attempt(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Result<Option<GeneratedCase>> {
    let nf = spec.n_features;
    let features: Vec<Feature> = (0..nf)
        .map(|i| Feature {
            id: feature_name(i),
            mandatory: i == 0,
        })
        .collect();

    // Owners: one statement per feature first, the rest at random.
    let owners: Vec<usize> = (0..spec.n_statements)
        .map(|i| if i < nf { i } else { rng.gen_range(0..nf) })
        .collect();
    let mut uses: Vec<BTreeSet<String>> = vec![BTreeSet::new(); spec.n_statements];
    let mut edges = Vec::new();
    #[allow(clippy::needless_range_loop)]
    for from in 0..spec.n_statements {
        for to in from + 1..spec.n_statements {
            if rng.gen_bool(spec.edge_density) {
                let kind = if rng.gen_bool(0.5) {
                    DepKind::Data
                } else {
                    DepKind::Control
                };
                if kind == DepKind::Data {
                    uses[to].insert(format!("v{from}"));
                }
                edges.push(DepEdge::new(format!("s{from}"), format!("s{to}"), kind));
            }
        }
    }
    let statements: Vec<Statement> = (0..spec.n_statements)
        .map(|i| Statement {
            id: StatementId::from(format!("s{i}")),
            feature: feature_name(owners[i]),
            defs: BTreeSet::from([format!("v{i}")]),
            uses: std::mem::take(&mut uses[i]),
        })
        .collect();
    let system = SplSystem::new(features, statements, edges, Vec::new())?;

    let buggy_pc = match &spec.bug {
        BugSpec::Fixed(pc) => pc.clone(),
        BugSpec::Random { pc_size } => {
            let mut optional: Vec<usize> = (1..nf).collect();
            optional.shuffle(rng);
            let mut chosen: Vec<usize> = optional[..*pc_size].to_vec();
            chosen.sort_unstable();
            PartialConfiguration::from_selections(
                chosen
                    .into_iter()
                    .map(|f| FeatureSelection::new(feature_name(f), rng.gen_bool(0.5))),
            )?
        }
    };

    // The buggy statement lives in an enabled feature of the PC, or in Base.
    let enabled = buggy_pc.enabled_features();
    let host = if enabled.is_empty() {
        FeatureId::from("Base")
    } else {
        enabled[rng.gen_range(0..enabled.len())].clone()
    };
    let hosted: Vec<StatementId> = system.implementation(host.as_str())?.into_iter().collect();
    let bug = hosted[rng.gen_range(0..hosted.len())].clone();

    let configs = sample_configurations(spec, &buggy_pc, rng);
    let mut products = Vec::with_capacity(configs.len());
    let mut spectra = Vec::with_capacity(configs.len());
    for (i, config) in configs.into_iter().enumerate() {
        let product = system.compose_product(format!("p{i}"), &config)?;
        let buggy = product.contains(&buggy_pc)?;
        let tests = make_tests(spec, &system, &product, &bug, buggy, rng)?;
        spectra.push(ProductSpectra::new(product.clone(), tests)?);
        products.push(product);
    }

    // A variability bug fails a non-empty strict subset of the products.
    let failing = spectra.iter().filter(|s| s.is_failing()).count();
    if failing == 0 || failing == spectra.len() {
        return Ok(None);
    }
    let truth = GroundTruth::new(BTreeSet::from([bug.clone()]))?;
    Ok(Some(GeneratedCase {
        dataset: Dataset {
            system,
            products,
            spectra,
        },
        truth,
        buggy_pc,
        buggy_statement: bug,
        seed: spec.seed,
    }))
}

/// Random configurations with Base on. The first one contains the buggy PC
/// and the second differs from it on one PC selection, so both outcomes
/// are represented.
fn sample_configurations(
    spec: &GeneratorSpec,
    pc: &PartialConfiguration,
    rng: &mut ChaCha8Rng,
) -> Vec<Configuration> {
    let random = |rng: &mut ChaCha8Rng| -> BTreeMap<FeatureId, bool> {
        (0..spec.n_features)
            .map(|i| (feature_name(i), i == 0 || rng.gen_bool(0.5)))
            .collect()
    };
    let mut out = Vec::with_capacity(spec.n_products);
    let mut first = random(rng);
    for sel in pc.iter() {
        first.insert(sel.feature.clone(), sel.enabled);
    }
    let mut second = first.clone();
    let flippable: Vec<FeatureSelection> = pc.iter().filter(|s| s.feature.as_str() != "Base").collect();
    if let Some(sel) = flippable.choose(rng) {
        second.insert(sel.feature.clone(), !sel.enabled);
    }
    out.push(Configuration::new(first));
    out.push(Configuration::new(second));
    while out.len() < spec.n_products {
        out.push(Configuration::new(random(rng)));
    }
    out
}

fn make_tests(
    spec: &GeneratorSpec,
    system: &SplSystem,
    product: &Product,
    bug: &StatementId,
    buggy: bool,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<TestCase>> {
    let present: Vec<&StatementId> = product.statements.iter().collect();
    let mut tests = Vec::with_capacity(spec.tests_per_product);
    for t in 0..spec.tests_per_product {
        let mut covered: BTreeSet<StatementId> = present
            .iter()
            .filter(|_| rng.gen_bool(0.5))
            .map(|s| (*s).clone())
            .collect();
        if buggy && t == 0 {
            covered.insert(bug.clone());
        }
        let fails = buggy && covered.contains(bug);
        let failure_point = if fails {
            let reach: Vec<StatementId> = impact_set(system, bug.as_str(), product)?
                .into_iter()
                .filter(|s| covered.contains(s))
                .collect();
            Some(reach[rng.gen_range(0..reach.len())].clone())
        } else {
            None
        };
        tests.push(TestCase {
            id: format!("t{t}"),
            outcome: if fails { Outcome::Fail } else { Outcome::Pass },
            covered,
            failure_point,
        });
    }
    Ok(tests)
}

/// Brute-force suspicious partial configurations: every non-empty subset
/// of every failing configuration that no passing configuration contains,
/// reduced to the ⊆-minimal ones. Origins are the failing products
/// containing each set.
pub fn oracle_spcs(
    passing: &[&Product],
    failing: &[&Product],
    system: &SplSystem,
) -> Result<Vec<SuspiciousPc>> {
    let n = system.features().len();
    if n > ORACLE_MAX_FEATURES {
        return Err(Error::TooManyFeatures {
            max: ORACLE_MAX_FEATURES,
            got: n,
        });
    }
    let mut revealing: BTreeSet<PartialConfiguration> = BTreeSet::new();
    for c in failing {
        let sels: Vec<FeatureSelection> = c.config.iter().collect();
        for mask in 1u32..(1 << sels.len()) {
            let pc = PartialConfiguration::from_selections(
                sels.iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, s)| s.clone()),
            )?;
            let in_passing = passing.iter().any(|p| p.config.contains(&pc).unwrap_or(false));
            if !in_passing {
                revealing.insert(pc);
            }
        }
    }
    let minimal: Vec<&PartialConfiguration> = revealing
        .iter()
        .filter(|pc| !revealing.iter().any(|o| o != *pc && o.is_subset_of(pc)))
        .collect();
    let mut out: Vec<SuspiciousPc> = minimal
        .into_iter()
        .map(|pc| SuspiciousPc {
            selections: pc.clone(),
            origin: failing
                .iter()
                .filter(|c| c.config.contains(pc).unwrap_or(false))
                .map(|c| c.id.clone())
                .collect(),
        })
        .collect();
    out.sort_by(|a, b| {
        a.len()
            .cmp(&b.len())
            .then_with(|| a.selections.cmp(&b.selections))
    });
    Ok(out)
}

/// Ω(s, p) by repeated relaxation over the edge list until nothing changes.
pub fn oracle_closure(system: &SplSystem, s: &str, p: &Product) -> Result<BTreeSet<StatementId>> {
    system.statement(s)?;
    let mut set = BTreeSet::new();
    if !p.contains_statement(s) {
        return Ok(set);
    }
    set.insert(StatementId::from(s));
    loop {
        let mut changed = false;
        for e in system.dependencies() {
            if set.contains(&e.from) && p.contains_statement(e.to.as_str()) && set.insert(e.to.clone()) {
                changed = true;
            }
        }
        if !changed {
            return Ok(set);
        }
    }
}

/// A random dependency graph over one product containing every statement,
/// for closure cross-checks. Edges may form cycles.
pub fn random_graph(n_statements: usize, edge_density: f64, seed: u64) -> Result<(SplSystem, Product)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let statements: Vec<Statement> = (0..n_statements)
        .map(|i| Statement {
            id: StatementId::from(format!("s{i}")),
            feature: FeatureId::from("Base"),
            defs: BTreeSet::new(),
            uses: BTreeSet::new(),
        })
        .collect();
    let mut edges = Vec::new();
    for from in 0..n_statements {
        for to in 0..n_statements {
            if from != to && rng.gen_bool(edge_density) {
                edges.push(DepEdge::new(format!("s{from}"), format!("s{to}"), DepKind::Data));
            }
        }
    }
    let system = SplSystem::new(
        vec![Feature {
            id: FeatureId::from("Base"),
            mandatory: true,
        }],
        statements,
        edges,
        Vec::new(),
    )?;
    let config = Configuration::new(BTreeMap::from([(FeatureId::from("Base"), true)]));
    let product = system.compose_product("p", &config)?;
    Ok((system, product))
}
