use thiserror::Error;

use crate::schemes::Symbol;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("variables are defined over different source bases")]
    BasisMismatch,

    #[error("invalid source basis: {0}")]
    InvalidBasis(String),

    #[error("coefficient vector has length {found}, basis has {expected} sources")]
    CoefficientLength { expected: usize, found: usize },

    #[error("invalid value for `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("invalid distribution `{what}`: {reason}")]
    InvalidDistribution { what: String, reason: String },

    #[error("joint alphabet has {entries} entries, limit is {limit}")]
    AlphabetTooLarge { entries: u128, limit: u128 },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("variable `{0}` appears in more than one argument set")]
    OverlappingSets(String),

    #[error("symbol {0} is not provided by this model")]
    MissingSymbol(Symbol),

    #[error("unknown scheme `{0}` (expected cf_nobin, cf_binning or nnc)")]
    UnknownScheme(String),

    #[error("{0} diverges at sigma2 = 0")]
    Divergent(&'static str),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn distribution(what: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidDistribution {
            what: what.into(),
            reason: reason.into(),
        }
    }
}
