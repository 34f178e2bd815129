use thiserror::Error;

/// Errors shared by all construction and verification entry points.
#[derive(Debug, Error)]
pub enum SpannerError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("empty point set")]
    EmptyPointSet,

    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },

    #[error("points {0} and {1} are identical; inputs must be distinct")]
    DuplicatePoint(usize, usize),

    #[error("unsupported dimension {got}; this operation requires d = {want}")]
    WrongDimension { want: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("vertex {0} is not in the graph")]
    UnknownVertex(usize),

    #[error("pair ({0}, {1}) has zero distance")]
    ZeroDistancePair(usize, usize),

    #[error("graph is not a tree ({vertices} vertices, {edges} edges, connected: {connected})")]
    NotATree {
        vertices: usize,
        edges: usize,
        connected: bool,
    },

    #[error("point {point} is not within radius {radius} of any center")]
    UncoveredPoint { point: usize, radius: f64 },

    #[error("target {index} does not lie on the segment (offset {offset:.3e})")]
    TargetOffSegment { index: usize, offset: f64 },

    #[error("target {index} lies outside the disc (excess {excess:.3e})")]
    TargetOutsideDisc { index: usize, excess: f64 },
}

pub type Result<T> = std::result::Result<T, SpannerError>;

impl SpannerError {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        SpannerError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
