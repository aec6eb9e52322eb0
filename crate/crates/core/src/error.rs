use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty experiment: {0}")]
    EmptyExperiment(String),

    #[error("fold totals mismatch in dataset {dataset}: {detail}")]
    FoldTotalsMismatch { dataset: usize, detail: String },

    #[error("missing aggregation mode: {0}")]
    MissingAggregationMode(String),

    #[error("unexpected aggregation mode: {0}")]
    UnexpectedAggregationMode(String),

    #[error("incompatible aggregation: {0}")]
    IncompatibleAggregation(String),

    #[error("invalid testset: {0}")]
    InvalidTestset(String),

    #[error("mixed dataset kinds: {0}")]
    MixedDatasets(String),

    #[error("invalid fold count k={k} for {total} samples")]
    InvalidFoldCount { k: u64, total: u64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown score id '{0}'")]
    UnknownScoreId(String),

    #[error("score '{0}' is not affine in the confusion counts and cannot be tested under mean-of-scores aggregation")]
    NonlinearScoreUnsupported(String),

    #[error("invalid regression context: {0}")]
    InvalidContext(String),

    #[error("r2 reported without a target variance")]
    MissingVariance,

    #[error("negative uncertainty radius for '{0}'")]
    NegativeRadius(String),

    #[error("empty score report")]
    EmptyReport,

    #[error("unknown bundle '{id}'; available: {}", available.join(", "))]
    UnknownBundle { id: String, available: Vec<String> },

    #[error("bundle '{id}' is malformed: {detail}")]
    MalformedBundle { id: String, detail: String },

    #[error("too many fold configurations: {count} exceeds cap {cap}")]
    TooManyConfigurations { count: u64, cap: u64 },

    #[error("feasible region too large: {count} candidate pairs exceed cap {cap}")]
    RegionTooLarge { count: u128, cap: u128 },

    #[error("instance too large for exhaustive enumeration: {size} exceeds {cap}")]
    InstanceTooLarge { size: u128, cap: u128 },

    #[error("integer search exceeded {nodes} nodes without a decision")]
    SearchLimitExceeded { nodes: u64 },

    #[error("arithmetic overflow while scaling constraints")]
    Overflow,
}

impl Error {
    /// True for refusals to decide (resource caps), as opposed to malformed input.
    pub fn is_resource_refusal(&self) -> bool {
        matches!(
            self,
            Error::TooManyConfigurations { .. }
                | Error::RegionTooLarge { .. }
                | Error::InstanceTooLarge { .. }
                | Error::SearchLimitExceeded { .. }
        )
    }
}
