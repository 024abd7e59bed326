use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("unknown node {0}")]
    UnknownNode(usize),

    #[error("node {0} is already an input node")]
    AlreadyInput(usize),

    #[error("stale swap: edge {src}->{dst} no longer present or swap no longer valid")]
    StaleSwap { src: usize, dst: usize },

    #[error("journal underflow: asked to undo {requested} swaps but only {available} recorded")]
    JournalUnderflow { requested: usize, available: usize },

    #[error("invalid gate spec: {0}")]
    InvalidGate(String),

    #[error("mismatch: {0}")]
    Mismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
