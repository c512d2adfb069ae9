use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid option or parameter combination.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An operation that requires corpus data received none.
    #[error("corpus is empty")]
    EmptyCorpus,

    /// The underlying line stream failed during ingestion.
    #[error("read failed at line {line}: {source}")]
    CorpusRead {
        line: u64,
        #[source]
        source: std::io::Error,
    },

    /// A token id outside the model vocabulary was passed to `decode`.
    #[error("token id {id} at position {position} out of range (vocab size {vocab_size})")]
    TokenIdOutOfRange {
        position: usize,
        id: u32,
        vocab_size: usize,
    },

    /// A candidate token has no entry in the subtoken map.
    #[error("no subtoken entry for token {0:?}")]
    MissingSubtokens(String),

    /// A subtoken id refers past the end of the base embedding matrix.
    #[error("subtoken id {id} for token {token:?} out of range ({rows} base rows)")]
    SubtokenIdOutOfRange { token: String, id: u32, rows: usize },

    /// Gradient-mask threshold outside `0..=rows`.
    #[error("freeze threshold {threshold} out of range for {rows} rows")]
    ThresholdOutOfRange { threshold: usize, rows: usize },

    /// A text artifact (config, subtoken map, filter file) failed to parse.
    #[error("malformed {what} at line {line}: {detail}")]
    Parse {
        what: &'static str,
        line: u64,
        detail: String,
    },

    /// A binary or JSON artifact is structurally invalid.
    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("model serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
