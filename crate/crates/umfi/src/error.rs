//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("column {0:?} not found in header")]
    MissingColumn(String),

    #[error("duplicate column name {0:?}")]
    DuplicateColumn(String),

    #[error("cell at data row {row}, column {column:?} is not numeric")]
    NonNumeric { row: usize, column: String },

    #[error("cell at data row {row}, column {column:?} is not finite")]
    NonFinite { row: usize, column: String },

    #[error("need at least {min} rows, got {got}")]
    TooFewRows { got: usize, min: usize },

    #[error("feature index {index} out of range for {p} features")]
    IndexOutOfRange { index: usize, p: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("cannot fit a model on an empty feature set; use the empty-set convention instead")]
    EmptyFeatureSet,

    #[error("fewer than half of the rows have out-of-bag predictions")]
    NoOobRows,

    #[error("exact subset enumeration requires p <= {max}, got p = {p}")]
    SubsetBudgetExceeded { p: usize, max: usize },

    #[error("variable groups overlap")]
    OverlappingGroups,

    #[error("need at least {min} points, got {got}")]
    TooFewPoints { got: usize, min: usize },

    #[error("requested subset size {requested} exceeds the {available} available features")]
    RangeExceedsFeatures { requested: usize, available: usize },

    #[error("classification response has a single class; need at least two")]
    SingleClass,

    #[error("{0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
