use thiserror::Error;

pub type Result<T, E = OimError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum OimError {
    #[error("grid dimensions must be positive, got {width}x{height}")]
    EmptyGrid { width: usize, height: usize },

    #[error("node {node} out of range for a grid of {nodes} nodes")]
    NodeOutOfRange { node: usize, nodes: usize },

    #[error("nodes {i} and {j} are not king-adjacent")]
    NotAdjacent { i: usize, j: usize },

    #[error("duplicate edge ({i}, {j})")]
    DuplicateEdge { i: usize, j: usize },

    #[error("edge ({i}, {j}) has weight {w}; expected a nonzero value in [-127, 127]")]
    WeightOutOfRange { i: usize, j: usize, w: i64 },

    #[error("assignment has {got} entries but the instance has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },

    #[error("expected a {expected} instance, got {got}")]
    KindMismatch {
        expected: &'static str,
        got: &'static str,
    },

    #[error("instance has {nodes} nodes; {solver} is limited to {limit}")]
    TooLarge {
        solver: &'static str,
        nodes: usize,
        limit: usize,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("max-cut accuracy is undefined for a reference cut of {0}")]
    NonPositiveReference(i64),

    #[error("run {run} reached objective {objective}, better than the reference {reference}")]
    ReferenceExceeded {
        run: usize,
        objective: i64,
        reference: i64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
