use thiserror::Error;

/// Errors produced while loading inputs or running an analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("unknown statement `{0}`")]
    UnknownStatement(String),
    #[error("configuration has no selection for feature `{0}`")]
    MissingSelection(String),
    #[error("configurations have different feature domains")]
    DomainMismatch,
    #[error("partial configuration must not be empty")]
    EmptyPartialConfiguration,
    #[error("statement `{statement}` is not part of product `{product}`")]
    StatementNotInProduct { statement: String, product: String },
    #[error("suspicious partial configuration {spc} is not contained in product `{product}`")]
    NotContained { spc: String, product: String },
    #[error("invalid input at {path}: {message}")]
    Validation { path: String, message: String },
    #[error("combination weight {0} is outside [0, 1]")]
    InvalidWeight(f64),
    #[error("maximum interaction size must be at least 1 (got {0})")]
    InvalidInteractionSize(usize),
    #[error("hit@X needs X >= 1")]
    InvalidHitBudget,
    #[error("unknown metric `{0}`")]
    UnknownMetric(String),
    #[error("unknown {kind} `{value}`")]
    UnknownOption { kind: &'static str, value: String },
    #[error("no failed test in the input spectra")]
    NoFailedTests,
    #[error("no failing product in the input spectra")]
    NoFailingProducts,
    #[error("failed test `{test}` of product `{product}` has no failure_point")]
    MissingFailurePoint { product: String, test: String },
    #[error("infeasible generator spec: {0}")]
    Infeasible(String),
    #[error("brute-force oracle supports at most {max} features (got {got})")]
    TooManyFeatures { max: usize, got: usize },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for errors raised because a technique's own precondition does
    /// not hold on otherwise valid input.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::MissingFailurePoint { .. } | Error::NoFailedTests | Error::NoFailingProducts
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
