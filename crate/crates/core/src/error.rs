use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("duplicate element {0}")]
    DuplicateElement(String),
    #[error("invalid family spec: {0}")]
    InvalidSpec(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("resource limit exceeded for {what}: projected {projected} > cap {cap}")]
    ResourceLimit {
        what: &'static str,
        projected: String,
        cap: u64,
    },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("set contains zero")]
    ZeroElement,
    #[error("set contains non-positive elements")]
    NonPositiveElements,
    #[error("empty tuple graph")]
    EmptyGraph,
    #[error("degenerate alpha {0} (must be <= 1)")]
    DegenerateAlpha(String),
    #[error("stage {0} produced an empty set")]
    EmptyStage(&'static str),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("quotient {0} is not in A/A")]
    QuotientAbsent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn limit(what: &'static str, projected: impl ToString, cap: u64) -> Self {
        Error::ResourceLimit {
            what,
            projected: projected.to_string(),
            cap,
        }
    }
}
