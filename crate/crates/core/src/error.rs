use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("expected a permutation system, got a relation system")]
    NotPermutation,

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("invalid tower: {0}")]
    InvalidTower(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid odometer spec: {0}")]
    InvalidSpec(String),

    #[error("digit {index} is {digit}, outside 0..{base}")]
    DigitOutOfRange { index: usize, digit: u64, base: u64 },

    #[error("level {got} is out of range ({expected})")]
    LevelOutOfRange { got: usize, expected: String },

    #[error("resource cap exceeded: {what} needs {needed} states, cap is {cap}")]
    ResourceCap {
        what: String,
        needed: u128,
        cap: u128,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
