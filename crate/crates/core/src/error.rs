use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("negative weight {weight} on entry {entry} ({from} -> {to})")]
    NegativeWeight {
        entry: usize,
        from: String,
        to: String,
        weight: String,
    },

    #[error("network has zero total weight")]
    ZeroTotalWeight,

    #[error("edge weights are too finely graded to score exactly (scaled magnitude exceeds 2^96)")]
    ScoreOverflow,

    #[error("partition covers {got} nodes, network has {expected}")]
    PartitionSize { expected: usize, got: usize },

    #[error("network has {n} nodes, exhaustive enumeration is capped at {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("linear program: {0}")]
    Lp(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown node label {0:?}")]
    UnknownLabel(String),

    #[error("certificate document: {0}")]
    Document(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
