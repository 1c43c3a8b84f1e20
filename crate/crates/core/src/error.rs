use thiserror::Error;

pub type Result<T> = std::result::Result<T, ReachError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReachError {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid boundary parameters: {0}")]
    InvalidParams(String),

    #[error("invalid input schedule: {0}")]
    InvalidSchedule(String),

    #[error("series of order {available} is too short, need index {needed}")]
    SeriesTooShort { needed: usize, available: usize },

    #[error("polynomial division is not exact")]
    InexactDivision,

    #[error("block order {0} is outside the supported range 1..=8")]
    UnsupportedOrder(usize),

    #[error("face not a vertex in block {0}")]
    FaceNotVertex(usize),

    #[error("degenerate block {0} has no implicit surface")]
    DegenerateBlock(usize),

    #[error("non-generic line")]
    NonGenericLine,

    #[error("unsupported input set: {0}")]
    UnsupportedInputSet(String),
}

impl ReachError {
    /// Errors that come from the numbers rather than from malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            ReachError::FaceNotVertex(_)
                | ReachError::DegenerateBlock(_)
                | ReachError::NonGenericLine
                | ReachError::InexactDivision
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ReachError::InvalidSpec(_) => "invalid_spec",
            ReachError::DimensionMismatch { .. } => "dimension_mismatch",
            ReachError::InvalidParams(_) => "invalid_params",
            ReachError::InvalidSchedule(_) => "invalid_schedule",
            ReachError::SeriesTooShort { .. } => "series_too_short",
            ReachError::InexactDivision => "inexact_division",
            ReachError::UnsupportedOrder(_) => "unsupported_order",
            ReachError::FaceNotVertex(_) => "face_not_vertex",
            ReachError::DegenerateBlock(_) => "degenerate_block",
            ReachError::NonGenericLine => "non_generic_line",
            ReachError::UnsupportedInputSet(_) => "unsupported_input_set",
        }
    }
}
