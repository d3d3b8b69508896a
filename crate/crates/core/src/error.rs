use thiserror::Error;

/// Errors produced by the geometry, graph, basis and solver layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not a rotation (orthonormality defect {defect:e}, det {det})")]
    NotARotation { defect: f64, det: f64 },
    #[error("vector has zero length")]
    ZeroVector,
    #[error("scale must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("noise level must be non-negative, got {0}")]
    NegativeNoise(f64),
    #[error("camera centers coincide (|t| = {0:e})")]
    CoincidentCenters(f64),
    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge between {0} and {1}")]
    DuplicateEdge(usize, usize),
    #[error("edge {0} does not exist")]
    MissingEdge(usize),
    #[error("no edge between {0} and {1}")]
    NotAdjacent(usize, usize),
    #[error("graph is disconnected ({0} components)")]
    Disconnected(usize),
    #[error("graph is not biconnected")]
    NotBiconnected,
    #[error("edge set is not a spanning tree: {0}")]
    NotSpanningTree(String),
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("edge weights must be positive")]
    NonPositiveWeight,
    #[error("no null circuit survived the rotation-consistency filter")]
    EmptyBasis,
    #[error("constraint system needs at least {need} unknowns, got {got}")]
    TooFewUnknowns { need: usize, got: usize },
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("could not generate a solvable scene after {0} attempts")]
    SceneGeneration(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
