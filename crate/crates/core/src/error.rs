use thiserror::Error;

pub type Result<T, E = SoltesError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SoltesError {
    #[error("a digraph needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("difference {value} outside 1..={max}")]
    DifferenceOutOfRange { value: usize, max: usize },
    #[error("difference {0} listed twice")]
    DuplicateDifference(usize),
    #[error("vertex {vertex} (1-based) matched by {matches} rules, expected exactly one")]
    SelectorOverlap { vertex: usize, matches: usize },
    #[error("invalid selector: {0}")]
    InvalidSelector(String),
    #[error("vertex {vertex} out of range for a digraph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("vertex {0} has been deleted")]
    DeletedVertex(usize),
    #[error("invalid arc {0} -> {1}")]
    InvalidArc(usize, usize),
    #[error("digraph is not strongly connected")]
    NotStronglyConnected,
    #[error("parameters invalid: {0}")]
    InvalidParameters(String),
    #[error("parse error: {0}")]
    Parse(String),
}
