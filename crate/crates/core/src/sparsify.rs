//! Edge sampling that preserves chain structure and the spectral gap.
//!
//! Each endpoint of an edge nominates it with probability proportional to
//! the edge weight over that endpoint's relevant degree, scaled by
//! alpha_s ln(n) / lambda_2 and clamped at 1. A single Bernoulli draw per
//! edge with the union probability p_e realizes the same marginal as two
//! per-endpoint draws, and retained edges are reweighted to w / p_e so
//! every cut is preserved in expectation.
//!
//! The per-edge uniform is counter-based on (seed, edge index), so raising
//! alpha_s with the same seed never drops a previously retained edge.

use crate::digraph::{MergePolicy, WeightedDigraph};
use crate::error::{Error, Result};
use crate::flow::Partition;
use crate::hermitian::HermitianLaplacian;
use crate::rng::stream_unit;
use crate::solver::{self, SolverConfig};

const SALT_KEEP: u64 = 0x5A;

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SparsifierConfig {
    /// Sampling constant; larger keeps more edges.
    pub alpha_s: f64,
    /// Second eigenvalue of the normalized Laplacian, supplied by the
    /// caller or estimated with the solver beforehand.
    pub lambda2: f64,
    pub seed: u64,
}

impl SparsifierConfig {
    pub fn new(lambda2: f64, seed: u64) -> Self {
        Self { alpha_s: 1.0, lambda2, seed }
    }

    pub fn with_alpha(mut self, alpha_s: f64) -> Self {
        self.alpha_s = alpha_s;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha_s.is_finite() && self.alpha_s > 0.0) {
            return Err(Error::InvalidParameter { name: "alpha_s", value: self.alpha_s });
        }
        if !(self.lambda2.is_finite() && self.lambda2 > 0.0) {
            return Err(Error::InvalidParameter { name: "lambda2", value: self.lambda2 });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SparsifiedGraph {
    /// Retained edges with weights w / p_e.
    pub graph: WeightedDigraph,
    pub retained: usize,
    /// Sum of p_e over the input edges.
    pub expected_retained: f64,
}

/// Union of two independent selection probabilities.
pub(crate) fn union_probability(p_u: f64, p_v: f64) -> f64 {
    p_u + p_v - p_u * p_v
}

fn edge_probabilities(
    w: f64,
    d_out_src: f64,
    d_in_dst: f64,
    ln_n: f64,
    cfg: &SparsifierConfig,
) -> (f64, f64, f64) {
    let factor = w * cfg.alpha_s * ln_n / cfg.lambda2;
    let p_u = (factor / d_out_src).min(1.0);
    let p_v = (factor / d_in_dst).min(1.0);
    (p_u, p_v, union_probability(p_u, p_v))
}

/// (p_u, p_v, p_e) for an existing edge (u, v).
pub fn sampling_probabilities(
    g: &WeightedDigraph,
    u: usize,
    v: usize,
    cfg: &SparsifierConfig,
) -> Result<(f64, f64, f64)> {
    cfg.validate()?;
    let w = g.weight(u, v).ok_or(Error::EdgeNotFound { u, v })?;
    let ln_n = (g.vertex_count() as f64).ln();
    Ok(edge_probabilities(w, g.degree_out(u), g.degree_in(v), ln_n, cfg))
}

/// Keeps each edge independently with probability p_e and reweights to
/// w / p_e. An empty output graph is legal.
pub fn sparsify(g: &WeightedDigraph, cfg: &SparsifierConfig) -> Result<SparsifiedGraph> {
    cfg.validate()?;
    let ln_n = (g.vertex_count() as f64).ln();
    let mut kept = Vec::new();
    let mut expected = 0.0;
    for (e, &(u, v, w)) in g.edges().iter().enumerate() {
        let (_, _, p_e) =
            edge_probabilities(w, g.degree_out(u), g.degree_in(v), ln_n, cfg);
        expected += p_e;
        if stream_unit(cfg.seed, e as u64, SALT_KEEP) < p_e {
            kept.push((u, v, w / p_e));
        }
    }
    let retained = kept.len();
    let graph = WeightedDigraph::from_edge_list(&kept, g.vertex_count(), MergePolicy::Sum)?;
    Ok(SparsifiedGraph { graph, retained, expected_retained: expected })
}

/// Side-by-side flow, cut, volume, and eigenvalue figures for a partition
/// on the original graph and its sparsifier. Carries no pass/fail verdict.
#[derive(Debug, Clone, serde::Serialize)]
pub struct PreservationReport {
    pub phi_original: Option<f64>,
    pub phi_sparsified: Option<f64>,
    /// w(S_j, S_{j-1}) per j = 1..k-1 in each graph.
    pub chain_cuts_original: Vec<f64>,
    pub chain_cuts_sparsified: Vec<f64>,
    /// Sparsified over original, None when the original cut is zero.
    pub cut_ratios: Vec<Option<f64>>,
    pub volumes_original: Vec<f64>,
    pub volumes_sparsified: Vec<f64>,
    pub volume_ratios: Vec<Option<f64>>,
    pub lambda2_original: Option<f64>,
    pub lambda2_sparsified: Option<f64>,
    pub edges_original: usize,
    pub edges_retained: usize,
}

/// Chain cuts, volumes, and flow ratio with unlabeled vertices (and their
/// incident edges) excluded. A clustering computed on the sparsifier may
/// leave vertices unlabeled that the original graph still touches.
fn tolerant_chain(
    graph: &WeightedDigraph,
    p: &Partition,
) -> (Vec<f64>, Vec<f64>, Option<f64>) {
    let k = p.k();
    let mut vol = vec![0.0; k];
    for u in 0..graph.vertex_count().min(p.len()) {
        if let Some(l) = p.label(u) {
            vol[l] += graph.degree_total(u);
        }
    }
    let mut chain = vec![0.0; k.saturating_sub(1)];
    for &(u, v, w) in graph.edges() {
        if let (Some(lu), Some(lv)) = (p.label(u), p.label(v)) {
            if lu == lv + 1 {
                chain[lv] += w;
            }
        }
    }
    let phi = if vol.iter().all(|&v| v > 0.0) {
        Some((1..k).map(|j| chain[j - 1] / (vol[j] + vol[j - 1])).sum())
    } else {
        None
    };
    (chain, vol, phi)
}

pub fn preservation_report(
    g: &WeightedDigraph,
    h: &SparsifiedGraph,
    p: &Partition,
    k: usize,
    solver_cfg: &SolverConfig,
) -> Result<PreservationReport> {
    if p.len() != g.vertex_count() {
        return Err(Error::DimensionMismatch { expected: g.vertex_count(), got: p.len() });
    }
    let (chain_g, vol_g, phi_g) = tolerant_chain(g, p);
    let (chain_h, vol_h, phi_h) = tolerant_chain(&h.graph, p);
    let cut_ratios = chain_g
        .iter()
        .zip(&chain_h)
        .map(|(&cg, &ch)| (cg > 0.0).then(|| ch / cg))
        .collect();
    let volume_ratios = vol_g
        .iter()
        .zip(&vol_h)
        .map(|(&vg, &vh)| (vg > 0.0).then(|| vh / vg))
        .collect();

    let lambda2_of = |graph: &WeightedDigraph| -> Option<f64> {
        let op = HermitianLaplacian::new(graph, k).ok()?;
        if op.dim() < 2 {
            return None;
        }
        let bottom = solver::bottom_eigenpair(&op, solver_cfg).ok()?;
        solver::second_eigenvalue(&op, &bottom, solver_cfg).ok().map(|s| s.value)
    };

    Ok(PreservationReport {
        phi_original: phi_g,
        phi_sparsified: phi_h,
        chain_cuts_original: chain_g,
        chain_cuts_sparsified: chain_h,
        cut_ratios,
        volumes_original: vol_g,
        volumes_sparsified: vol_h,
        volume_ratios,
        lambda2_original: lambda2_of(g),
        lambda2_sparsified: lambda2_of(&h.graph),
        edges_original: g.edge_count(),
        edges_retained: h.retained,
    })
}
