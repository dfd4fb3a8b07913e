//! Error type shared by all surflab modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported grid dimension {0} (expected 1, 2 or 3)")]
    UnsupportedDimension(u8),

    #[error("wrong base family for transform: expected {expected}, got {got}")]
    WrongBaseFamily {
        expected: &'static str,
        got: &'static str,
    },

    #[error("unknown vertex id {0}")]
    UnknownVertex(u32),

    #[error("truncation would exceed the vertex cap {cap} at radius {radius}")]
    VertexCapExceeded { cap: usize, radius: u32 },

    #[error("{what} is defined on {got} entries but the view has {expected}")]
    DomainMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("vertex {0} is isolated (degree 0)")]
    IsolatedVertex(u32),

    #[error("view is not connected")]
    Disconnected,

    #[error("linear solver did not converge: {iterations} iterations, residual {residual:e}")]
    SolverDidNotConverge { iterations: usize, residual: f64 },

    #[error("malformed generator spec: {0}")]
    MalformedSpec(String),

    #[error("generator is not a tree: {0}")]
    NotATree(&'static str),

    #[error("end specification inconsistent with generator: {0}")]
    EndSpec(String),

    #[error("resistance profile too short: {0} points (need at least 3)")]
    ProfileTooShort(usize),

    #[error("weight missing for branch {0}")]
    MissingWeight(u32),

    #[error("negative weight on branch {0}")]
    NegativeWeight(u32),

    #[error("unknown branch id {0}")]
    UnknownBranch(u32),

    #[error("switch conditions violated at switches {0:?}")]
    SwitchViolation(Vec<u32>),

    #[error("curve/branch coverage precondition violated: {0}")]
    CoverageViolation(String),

    #[error("invalid foliation piece: {0}")]
    InvalidPiece(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
