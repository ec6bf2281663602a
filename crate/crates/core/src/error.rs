//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot open data file {path}: {source}")]
    DataFile {
        path: String,
        source: std::io::Error,
    },

    #[error("column {name:?} not found in CSV header")]
    MissingColumn { name: String },

    #[error("row {row}: column {column:?} holds {value:?}, expected a number or a missing-value token")]
    BadCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("variable subset is empty")]
    EmptySubset,

    #[error("variable index {index} outside 1..={max}")]
    VariableOutOfRange { index: usize, max: usize },

    #[error("training ratio {tau} outside the open interval (0, 1)")]
    BadTrainingRatio { tau: f64 },

    #[error("group {group} has {available} rows left, {requested} requested")]
    InfeasibleDraw {
        group: u8,
        requested: usize,
        available: usize,
    },

    #[error("prediction and label vectors differ in length ({predicted} vs {actual})")]
    LengthMismatch { predicted: usize, actual: usize },

    #[error("no performance matrices to aggregate")]
    EmptyAggregate,

    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },

    #[error("training column {column} has zero variance")]
    ZeroVariance { column: usize },

    #[error("design matrix is rank deficient")]
    RankDeficient,

    #[error("training data holds a single class")]
    SingleClass,

    #[error("group {group} needs at least {needed} training rows for {p} features, got {got}")]
    GroupTooSmall {
        group: u8,
        needed: usize,
        got: usize,
        p: usize,
    },

    #[error("all four curve pairs lack an intersection")]
    NoIntersections,

    #[error("{algorithm} failed in {failed} of {total} simulations, above the 10% ceiling")]
    TooManyFailures {
        algorithm: String,
        failed: usize,
        total: usize,
    },

    #[error("subset enumeration needs p <= {max}, got {p}")]
    SubsetSpaceTooLarge { p: usize, max: usize },

    #[error("experiment spec invalid: {reason}")]
    BadSpec { reason: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
