use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance size: {0}")]
    InvalidSize(String),

    #[error("instance generation failed after {attempts} pairing attempts (k = {k}, seed = {seed})")]
    GenerationFailed { k: usize, seed: u64, attempts: usize },

    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("regularity violation: {0}")]
    Regularity(String),

    #[error("invalid instance: {0}")]
    Validation(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("model is already in {0} convention")]
    InvalidConvention(&'static str),

    #[error("malformed gadget at auxiliary spin {0}: {1}")]
    MalformedGadget(usize, String),

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("index {index} out of range for {len} p-bits")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("temperature ladder exceeded {0} rungs without reaching the variance tolerance")]
    ScheduleOverflow(usize),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("no data: {0}")]
    NoData(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
