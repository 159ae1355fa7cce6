//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex id {id} out of range for graph with {n} vertices")]
    VertexOutOfRange { id: usize, n: usize },

    #[error("edge ({src}, {dst}) has invalid weight {weight} (must be finite and >= 0)")]
    InvalidWeight { src: usize, dst: usize, weight: f64 },

    #[error("reciprocal edge pair between {u} and {v} rejected by merge policy")]
    ReciprocalPair { u: usize, v: usize },

    #[error("duplicate edge ({u}, {v}) rejected by merge policy")]
    DuplicateEdge { u: usize, v: usize },

    #[error("vertex sets overlap (vertex {id} is in both)")]
    OverlappingSets { id: usize },

    #[error("{what} guard exceeded: size {n} > limit {max}")]
    SizeGuard {
        what: &'static str,
        n: usize,
        max: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("zero vector supplied where a nonzero vector is required")]
    ZeroVector,

    #[error("cluster count must be at least 2, got {k}")]
    KTooSmall { k: usize },

    #[error("operator is degenerate: {active} non-isolated vertices (need at least 2)")]
    DegenerateOperator { active: usize },

    #[error("solver did not converge: best residual {residual:.3e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },

    #[error("bottom eigenpair has residual {residual:.3e}, above tolerance {tolerance:.3e}")]
    BottomNotConverged { residual: f64, tolerance: f64 },

    #[error("cluster {index} is empty")]
    EmptyCluster { index: usize },

    #[error("cluster {index} has zero volume")]
    ZeroVolumeCluster { index: usize },

    #[error("invalid cluster label {label} for k = {k}")]
    InvalidLabel { label: usize, k: usize },

    #[error("vertex {id} is unlabeled but not isolated")]
    UnlabeledVertex { id: usize },

    #[error("need at least {needed} distinct embedded points, found {found}")]
    TooFewDistinctPoints { needed: usize, found: usize },

    #[error("k-means could not repair empty clusters after {restarts} restarts")]
    EmptyClusterUnrecoverable { restarts: usize },

    #[error("graph has {active} non-isolated vertices, fewer than k = {k}")]
    TooFewVertices { active: usize, k: usize },

    #[error("cluster count {k} does not divide vertex count {n}")]
    BlockSizeMismatch { n: usize, k: usize },

    #[error("invalid parameter {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("partitions cover different vertex sets ({a} vs {b} vertices)")]
    PartitionMismatch { a: usize, b: usize },

    #[error("projection of the bottom eigenvector on the indicator vector is zero")]
    ZeroProjection,

    #[error("edge ({u}, {v}) not present in graph")]
    EdgeNotFound { u: usize, v: usize },

    #[error("need at least 2 snapshots for a drift series, got {got}")]
    TooFewSnapshots { got: usize },

    #[error("volume-weighted matching requires a graph")]
    VolumeNeedsGraph,

    #[error("missing column {name:?} in input header")]
    MissingColumn { name: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
