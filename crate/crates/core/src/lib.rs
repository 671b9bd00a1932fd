//! Fault localization for variability bugs in software product lines.
//!
//! Given sampled product configurations, their test spectra and a
//! statement-level dependency description, the pipeline
//!
//! 1. detects suspicious partial configurations ([`bpc`]),
//! 2. isolates the statements implementing or impacting the feature
//!    interactions they describe ([`isolation`]),
//! 3. ranks them by product-level and test-level suspiciousness
//!    ([`ranking`]).
//!
//! Global SBFL, slice-restricted SBFL and feature-level ranking are
//! available for comparison ([`baselines`]), along with the usual quality
//! measures ([`evaluation`]) and a seeded case generator ([`testkit`]).
//!
//! ```
//! use varfl::{fixtures, localize, LocalizeOptions};
//!
//! let elevator = fixtures::elevator();
//! let out = localize(&elevator, &LocalizeOptions::default()).unwrap();
//! assert_eq!(out.ranked.entries()[0].statement.as_str(), "s31");
//! ```

pub mod baselines;
pub mod bpc;
pub mod cli;
pub mod dependency;
pub mod error;
pub mod evaluation;
pub mod fixtures;
pub mod io;
pub mod isolation;
pub mod localize;
pub mod metrics;
pub mod model;
pub mod ranking;
pub mod spectra;
pub mod testkit;

pub use baselines::TechniqueId;
pub use bpc::{detect_spcs, SuspiciousPc};
pub use error::{Error, Result};
pub use evaluation::{evaluate, EvalReport, GroundTruth};
pub use io::Dataset;
pub use localize::{localize, Localization, LocalizeOptions};
pub use metrics::Metric;
pub use model::{
    Configuration, FeatureId, FeatureSelection, PartialConfiguration, Product, SplSystem, StatementId,
};
pub use ranking::{Aggregation, Normalization, RankedList, RankingConfig};
pub use spectra::{ProductSpectra, SpectrumCounts};
