use alloc::string::String;

/// Errors raised by the concept pipeline and the models.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("duplicate record id {0}")]
    DuplicateId(u64),
    #[error("conflicting labels for record id {id}: {first:?} vs {second:?}")]
    LabelConflict {
        id: u64,
        first: String,
        second: String,
    },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("no parse for record {record} sentence {sentence}")]
    ParseLookup { record: u64, sentence: usize },
    #[error("invalid constituent tree: {0}")]
    InvalidTree(String),
    #[error("no embedding for fragment {0:?}")]
    EmbeddingMissing(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cosine distance undefined for a zero vector")]
    UndefinedMetric,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("degenerate task: {0}")]
    DegenerateTask(String),
    #[error("non-finite loss at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize },
    #[error("brute force refused: {concepts} concepts exceeds the limit of {limit}")]
    GuardExceeded { concepts: usize, limit: usize },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
