//! Clustering directed graphs by flow imbalance.
//!
//! A digraph whose clusters form a trade-chain-like structure (most edge
//! weight flowing from each cluster to the next) is embedded in the plane
//! through the bottom eigenvector of the complex Hermitian normalized
//! Laplacian. Degree-weighted k-means on that embedding recovers the
//! clusters, and an ordering pass labels them so the chain runs from the
//! highest cluster index (net sources) down to index 0 (net sinks).
//!
//! The crate ships the full pipeline plus everything needed to evaluate it:
//!
//! - [`digraph`]: sparse weighted digraph with degree/volume/cut queries
//! - [`hermitian`]: the Hermitian adjacency and matrix-free Laplacian operator
//! - [`solver`]: iterative bottom eigenpair + a dense eigendecomposition oracle
//! - [`flow`]: flow-ratio objective, brute-force optimum, indicator vectors
//! - [`cluster`]: spectral embedding, weighted k-means, cluster ordering
//! - [`sparsify`]: degree/eigenvalue-driven edge sampling and reweighting
//! - [`dsbm`]: directed stochastic block model benchmark generator
//! - [`eval`]: ARI, optimal cluster matching, drift series, two baselines
//! - [`trade`]: trade-report CSV ingestion and net-trade graph construction

pub mod cluster;
pub mod digraph;
pub mod dsbm;
pub mod error;
pub mod eval;
pub mod flow;
pub mod hermitian;
pub mod io;
pub mod rng;
pub mod solver;
pub mod sparsify;
pub mod trade;

pub use num_complex::Complex64;

pub use cluster::{Clustering, Embedding, KMeansConfig, SimpleHermDiagnostics};
pub use digraph::{DenseAdjacency, MergePolicy, VertexSet, WeightedDigraph};
pub use dsbm::{DsbmParams, DsbmVariant};
pub use error::{Error, Result};
pub use eval::{MatchWeight, MatchingResult};
pub use flow::{FlowReport, GammaReport, Partition};
pub use hermitian::{HermitianLaplacian, RootOfUnity};
pub use solver::{EigenPair, SecondEigen, SolverConfig};
pub use sparsify::{SparsifiedGraph, SparsifierConfig};
pub use trade::{CountryIndex, TradeRecord};
