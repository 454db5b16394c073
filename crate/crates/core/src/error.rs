use thiserror::Error;

pub type Result<T, E = ModelError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid tariff profile: {0}")]
    InvalidProfile(String),

    /// A tariff profile drives an equilibrium import flow below zero.
    #[error("prohibitive tariff: country {importer} imports {imports} of good {good}")]
    ProhibitiveTariff {
        importer: usize,
        good: usize,
        imports: String,
    },

    #[error("non-positive equilibrium price {price} for good {good} in country {country}")]
    NonPositivePrice {
        country: usize,
        good: usize,
        price: String,
    },

    #[error("country index out of range or degenerate pair: i={i}, j={j} (n={n})")]
    Index { i: usize, j: usize, n: usize },

    #[error("{what} = {value} outside [{min}, {max}]")]
    Range {
        what: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },

    #[error("best-response iteration did not converge in {iterations} iterations (last step {last_step:e})")]
    NoConvergence { iterations: usize, last_step: f64 },

    #[error("invalid FTA regime: {0}")]
    InvalidRegime(String),

    #[error("invalid customs-union partition: {0}")]
    InvalidPartition(String),

    #[error("game tree too large to enumerate: n={n} exceeds {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("parse error at position {position}: unexpected `{token}` ({reason})")]
    Parse {
        token: String,
        position: usize,
        reason: String,
    },
}

impl ModelError {
    pub(crate) fn parse(token: impl Into<String>, position: usize, reason: impl Into<String>) -> Self {
        ModelError::Parse {
            token: token.into(),
            position,
            reason: reason.into(),
        }
    }
}
