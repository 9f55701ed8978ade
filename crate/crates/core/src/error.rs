use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the fcssc library.
#[derive(Debug, Error)]
pub enum FcsscError {
    #[error("cannot read {path}: {source}")]
    Unreadable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),

    #[error("ragged rows: line {line} has {found} fields, expected {expected}")]
    RaggedRows {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("label column `{0}` not found")]
    MissingLabelColumn(String),

    #[error("column `{0}` has no observed values, cannot impute")]
    EmptyColumn(String),

    #[error("table has no rows")]
    NoRows,

    #[error("missing value at row {row}, column `{column}`")]
    MissingValue { row: usize, column: String },

    #[error("feature subset must be nonempty")]
    EmptySubset,

    #[error("feature index {index} out of range for {features} features")]
    FeatureOutOfRange { index: usize, features: usize },

    #[error("feature {0} is already in the reduct")]
    FeatureInReduct(usize),

    #[error("fuzzy granule has zero cardinality")]
    ZeroCardinalityGranule,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate Friedman statistic: n(m-1) - chi2 = {0:e}")]
    DegenerateFriedman(f64),
}

impl FcsscError {
    /// Stable machine-readable identifier for the error variant.
    pub fn code(&self) -> &'static str {
        match self {
            FcsscError::Unreadable { .. } => "unreadable_file",
            FcsscError::Csv(_) => "malformed_csv",
            FcsscError::RaggedRows { .. } => "ragged_rows",
            FcsscError::MissingLabelColumn(_) => "missing_label_column",
            FcsscError::EmptyColumn(_) => "empty_column",
            FcsscError::NoRows => "no_rows",
            FcsscError::MissingValue { .. } => "missing_value",
            FcsscError::EmptySubset => "empty_subset",
            FcsscError::FeatureOutOfRange { .. } => "feature_out_of_range",
            FcsscError::FeatureInReduct(_) => "feature_in_reduct",
            FcsscError::ZeroCardinalityGranule => "zero_cardinality_granule",
            FcsscError::InvalidConfig(_) => "invalid_config",
            FcsscError::DegenerateFriedman(_) => "degenerate_friedman",
        }
    }

    /// True for errors caused by caller-supplied parameters rather than data.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            FcsscError::InvalidConfig(_)
                | FcsscError::FeatureOutOfRange { .. }
                | FcsscError::FeatureInReduct(_)
                | FcsscError::EmptySubset
        )
    }
}

pub type Result<T> = std::result::Result<T, FcsscError>;
