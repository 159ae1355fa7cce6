//! Shared fixtures for the criterion benchmarks.

use hermflow_core::dsbm::{self, DsbmParams, DsbmVariant};
use hermflow_core::{Partition, WeightedDigraph};

/// Path-structured benchmark instance at the given scale.
pub fn benchmark_graph(n: usize, k: usize, seed: u64) -> (WeightedDigraph, Partition) {
    let params = DsbmParams {
        n,
        k,
        p: 0.075,
        q: 0.075,
        eta: 0.9,
        variant: DsbmVariant::PathOnly,
        seed,
    };
    dsbm::generate(&params).expect("valid benchmark parameters")
}
