use alloc::string::String;

/// Errors raised by fixlab-core operations.
///
/// Verdicts (pass / fail / inconclusive) are never errors; these cover
/// malformed inputs, refused preconditions, and configuration mistakes.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point belongs to space {got}, expected space {expected}")]
    SpaceMismatch { expected: u32, got: u32 },
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("precondition refused: {0}")]
    Precondition(String),
    #[error("evaluation failed: {0}")]
    Evaluation(String),
    #[error("gauge evaluated outside its working range [0, {t_max}] at t = {t}")]
    OutOfRange { t: f64, t_max: f64 },
    #[error("strict mode refuses an estimated set gap")]
    EstimatedGap,
    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },
}

pub type Result<T> = core::result::Result<T, Error>;
