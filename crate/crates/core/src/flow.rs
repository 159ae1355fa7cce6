//! Flow-ratio objective, brute-force optimum, and partition indicators.
//!
//! A k-way partition is scored by the flow ratio: the sum over consecutive
//! cluster pairs of the directed cut weight from S_j to S_{j-1}, divided by
//! the two clusters' combined volume. Edges flow from higher index to
//! lower, so the highest index is the chain source and index 0 the sink.
//! The maximum over all partitions (theta) is bounded by k/4, with equality
//! exactly on one-direction bipartite digraphs at k = 2.

use num_complex::Complex64;

use crate::digraph::WeightedDigraph;
use crate::error::{Error, Result};
use crate::hermitian::RootOfUnity;

/// Assignment of vertices to k ordered clusters. `None` marks vertices that
/// are excluded (isolated); every non-isolated vertex must carry a label
/// when the partition is used against a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<Option<u32>>,
    k: usize,
}

impl Partition {
    pub fn new(labels: Vec<Option<u32>>, k: usize) -> Result<Self> {
        let mut seen = vec![false; k];
        for label in labels.iter().flatten() {
            let l = *label as usize;
            if l >= k {
                return Err(Error::InvalidLabel { label: l, k });
            }
            seen[l] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::EmptyCluster { index: missing });
        }
        Ok(Self { labels, k })
    }

    /// Every vertex labeled.
    pub fn from_dense(labels: &[usize], k: usize) -> Result<Self> {
        Self::new(labels.iter().map(|&l| Some(l as u32)).collect(), k)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, u: usize) -> Option<usize> {
        self.labels[u].map(|l| l as usize)
    }

    pub fn labels(&self) -> &[Option<u32>] {
        &self.labels
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for label in self.labels.iter().flatten() {
            sizes[*label as usize] += 1;
        }
        sizes
    }

    pub fn members(&self, j: usize) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(u, l)| (l.map(|l| l as usize) == Some(j)).then_some(u))
            .collect()
    }
}

/// Flow-ratio evaluation of one partition.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FlowReport {
    pub phi: f64,
    /// (w(S_j, S_{j-1}), vol(S_j) + vol(S_{j-1})) for j = 1..k-1.
    pub per_cut: Vec<(f64, f64)>,
    /// 1 - (4/k) * phi, the induced bound on the bottom eigenvalue.
    pub eigenvalue_bound: f64,
}

/// Directed cut weights and volumes between every ordered cluster pair.
/// `cut[j][l]` sums edge weight from S_j to S_l (including j == l, the
/// intra-cluster weight).
pub(crate) struct ClusterCuts {
    pub cut: Vec<Vec<f64>>,
    pub vol: Vec<f64>,
    pub sizes: Vec<usize>,
}

pub(crate) fn cluster_cuts(g: &WeightedDigraph, p: &Partition) -> Result<ClusterCuts> {
    if p.len() != g.vertex_count() {
        return Err(Error::DimensionMismatch { expected: g.vertex_count(), got: p.len() });
    }
    let k = p.k();
    let mut vol = vec![0.0; k];
    let mut sizes = vec![0usize; k];
    for u in 0..g.vertex_count() {
        match p.label(u) {
            Some(l) => {
                vol[l] += g.degree_total(u);
                sizes[l] += 1;
            }
            None => {
                if !g.is_isolated(u) {
                    return Err(Error::UnlabeledVertex { id: u });
                }
            }
        }
    }
    let mut cut = vec![vec![0.0; k]; k];
    for &(u, v, w) in g.edges() {
        let (lu, lv) =
            (p.label(u).expect("endpoint labeled"), p.label(v).expect("endpoint labeled"));
        cut[lu][lv] += w;
    }
    Ok(ClusterCuts { cut, vol, sizes })
}

/// Flow ratio of a partition per the chain convention (cuts run from
/// cluster j down to j-1).
pub fn flow_ratio(g: &WeightedDigraph, p: &Partition) -> Result<FlowReport> {
    let ClusterCuts { cut, vol, sizes } = cluster_cuts(g, p)?;
    let k = p.k();
    for j in 0..k {
        if sizes[j] == 0 {
            return Err(Error::EmptyCluster { index: j });
        }
        if vol[j] <= 0.0 {
            return Err(Error::ZeroVolumeCluster { index: j });
        }
    }
    let mut phi = 0.0;
    let mut per_cut = Vec::with_capacity(k.saturating_sub(1));
    for j in 1..k {
        let denom = vol[j] + vol[j - 1];
        phi += cut[j][j - 1] / denom;
        per_cut.push((cut[j][j - 1], denom));
    }
    Ok(FlowReport { phi, per_cut, eigenvalue_bound: 1.0 - (4.0 / k as f64) * phi })
}

/// Caps on the exhaustive search. k^n labelings are enumerated, so the
/// defaults are deliberately small; raise them only for instances whose
/// structure keeps the k = 2 branch-and-bound fast.
#[derive(Debug, Clone, Copy)]
pub struct BruteForceLimits {
    pub max_vertices: usize,
    pub max_k: usize,
}

impl Default for BruteForceLimits {
    fn default() -> Self {
        Self { max_vertices: 12, max_k: 4 }
    }
}

/// Exhaustive maximum of the flow ratio over all surjective labelings of
/// the non-isolated vertices, with default guards.
pub fn max_flow_ratio(g: &WeightedDigraph, k: usize) -> Result<(f64, Partition)> {
    max_flow_ratio_with_limits(g, k, BruteForceLimits::default())
}

/// Exhaustive maximum with caller-supplied guards. Ties are broken by the
/// lexicographically smallest label vector over the non-isolated vertices
/// in id order. The k = 2 path prunes with an admissible bound, which
/// changes nothing about the returned value or tie-break.
pub fn max_flow_ratio_with_limits(
    g: &WeightedDigraph,
    k: usize,
    limits: BruteForceLimits,
) -> Result<(f64, Partition)> {
    if k < 2 {
        return Err(Error::KTooSmall { k });
    }
    let active = g.active_vertices();
    if active.len() > limits.max_vertices {
        return Err(Error::SizeGuard {
            what: "brute-force vertices",
            n: active.len(),
            max: limits.max_vertices,
        });
    }
    if k > limits.max_k {
        return Err(Error::SizeGuard { what: "brute-force k", n: k, max: limits.max_k });
    }
    if active.len() < k {
        return Err(Error::TooFewVertices { active: active.len(), k });
    }

    let best = if k == 2 {
        branch_and_bound_k2(g, &active)
    } else {
        exhaustive_search(g, &active, k)
    };
    let labels = best.expect("a surjective labeling exists");
    let partition = partition_from_active(g, &active, &labels, k)?;
    let phi = flow_ratio(g, &partition)?.phi;
    Ok((phi, partition))
}

fn partition_from_active(
    g: &WeightedDigraph,
    active: &[usize],
    labels: &[u32],
    k: usize,
) -> Result<Partition> {
    let mut full = vec![None; g.vertex_count()];
    for (a, &u) in active.iter().enumerate() {
        full[u] = Some(labels[a]);
    }
    Partition::new(full, k)
}

struct SearchState {
    labels: Vec<u32>,
    assigned: Vec<bool>,
    counts: Vec<usize>,
    vol: Vec<f64>,
    /// chain_cut[j] = w(S_j, S_{j-1}) over assigned vertices
    chain_cut: Vec<f64>,
    best_val: f64,
    best: Option<Vec<u32>>,
}

/// Plain exhaustive DFS for k >= 3 with incremental cut/volume tracking.
fn exhaustive_search(g: &WeightedDigraph, active: &[usize], k: usize) -> Option<Vec<u32>> {
    let n = active.len();
    let mut index_of = vec![usize::MAX; g.vertex_count()];
    for (a, &u) in active.iter().enumerate() {
        index_of[u] = a;
    }
    let mut state = SearchState {
        labels: vec![0; n],
        assigned: vec![false; n],
        counts: vec![0; k],
        vol: vec![0.0; k],
        chain_cut: vec![0.0; k],
        best_val: f64::NEG_INFINITY,
        best: None,
    };

    fn dfs(
        g: &WeightedDigraph,
        active: &[usize],
        index_of: &[usize],
        k: usize,
        depth: usize,
        s: &mut SearchState,
    ) {
        let n = active.len();
        if depth == n {
            if s.counts.iter().any(|&c| c == 0) {
                return;
            }
            let mut phi = 0.0;
            for j in 1..k {
                phi += s.chain_cut[j] / (s.vol[j] + s.vol[j - 1]);
            }
            if phi > s.best_val {
                s.best_val = phi;
                s.best = Some(s.labels.clone());
            }
            return;
        }
        let empties = s.counts.iter().filter(|&&c| c == 0).count();
        if n - depth < empties {
            return;
        }
        let u = active[depth];
        for l in 0..k as u32 {
            s.labels[depth] = l;
            s.assigned[depth] = true;
            s.counts[l as usize] += 1;
            s.vol[l as usize] += g.degree_total(u);
            let mut delta = vec![0.0f64; k];
            for &(v, w) in g.out_edges(u) {
                let av = index_of[v];
                if s.assigned[av] && l == s.labels[av] + 1 {
                    delta[l as usize] += w;
                }
            }
            for &(src, w) in g.in_edges(u) {
                let a_src = index_of[src];
                if s.assigned[a_src] && s.labels[a_src] == l + 1 {
                    delta[s.labels[a_src] as usize] += w;
                }
            }
            for j in 0..k {
                s.chain_cut[j] += delta[j];
            }
            dfs(g, active, index_of, k, depth + 1, s);
            for j in 0..k {
                s.chain_cut[j] -= delta[j];
            }
            s.vol[l as usize] -= g.degree_total(u);
            s.counts[l as usize] -= 1;
            s.assigned[depth] = false;
        }
    }

    dfs(g, active, &index_of, k, 0, &mut state);
    state.best
}

struct K2State<'a> {
    g: &'a WeightedDigraph,
    active: &'a [usize],
    out_eids: Vec<Vec<usize>>,
    in_eids: Vec<Vec<usize>>,
    weights: Vec<f64>,
    total: f64,
    vol_total: f64,
    labels: Vec<u32>,
    counts: [usize; 2],
    violated: Vec<bool>,
    violated_weight: f64,
    best_val: f64,
    best: Option<Vec<u32>>,
}

impl K2State<'_> {
    fn evaluate(&self, labels: &[u32]) -> Option<f64> {
        if !labels.contains(&0) || !labels.contains(&1) {
            return None;
        }
        let p = partition_from_active(self.g, self.active, labels, 2).ok()?;
        flow_ratio(self.g, &p).ok().map(|r| r.phi)
    }

    fn dfs(&mut self, depth: usize) {
        let n = self.active.len();
        if depth == n {
            if self.counts[0] == 0 || self.counts[1] == 0 {
                return;
            }
            let labels = self.labels.clone();
            if let Some(val) = self.evaluate(&labels) {
                if val > self.best_val || (val == self.best_val && self.best.is_none()) {
                    self.best_val = val;
                    self.best = Some(labels);
                }
            }
            return;
        }
        let remaining = n - depth;
        for l in 0..2u32 {
            let mut next_counts = self.counts;
            next_counts[l as usize] += 1;
            let empties =
                usize::from(next_counts[0] == 0) + usize::from(next_counts[1] == 0);
            if remaining - 1 < empties {
                continue;
            }
            // Label 0 kills this vertex's chance to source a 1 -> 0 cut
            // edge; label 1 kills its chance to sink one.
            let eids = if l == 0 {
                self.out_eids[depth].clone()
            } else {
                self.in_eids[depth].clone()
            };
            let mut newly = Vec::new();
            for e in eids {
                if !self.violated[e] {
                    self.violated[e] = true;
                    self.violated_weight += self.weights[e];
                    newly.push(e);
                }
            }
            let bound = (self.total - self.violated_weight) / self.vol_total;
            if bound >= self.best_val - 1e-12 * (1.0 + self.best_val.abs()) {
                self.labels[depth] = l;
                let saved = self.counts;
                self.counts = next_counts;
                self.dfs(depth + 1);
                self.counts = saved;
            }
            for e in newly {
                self.violated[e] = false;
                self.violated_weight -= self.weights[e];
            }
        }
    }
}

/// k = 2 search. phi = w(S_1, S_0) / vol(V), so a partial labeling admits
/// the bound (total weight minus weight that can no longer cross from 1 to
/// 0) over vol(V). Net-flow heuristics seed the incumbent value, which lets
/// structured instances (one-direction bipartite) close immediately;
/// pruning is strict-less-than, so the exhaustive value and lexicographic
/// tie-break are preserved exactly.
fn branch_and_bound_k2(g: &WeightedDigraph, active: &[usize]) -> Option<Vec<u32>> {
    let n = active.len();
    let mut index_of = vec![usize::MAX; g.vertex_count()];
    for (a, &u) in active.iter().enumerate() {
        index_of[u] = a;
    }
    let m = g.edge_count();
    let mut out_eids: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut in_eids: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, &(u, v, _)) in g.edges().iter().enumerate() {
        out_eids[index_of[u]].push(e);
        in_eids[index_of[v]].push(e);
    }
    let mut state = K2State {
        g,
        active,
        out_eids,
        in_eids,
        weights: g.edges().iter().map(|&(_, _, w)| w).collect(),
        total: g.total_weight(),
        vol_total: 2.0 * g.total_weight(),
        labels: vec![0; n],
        counts: [0, 0],
        violated: vec![false; m],
        violated_weight: 0.0,
        best_val: f64::NEG_INFINITY,
        best: None,
    };

    // Heuristic seeds: label net sources 1, net sinks 0, and the complement.
    let h1: Vec<u32> = active
        .iter()
        .map(|&u| u32::from(g.degree_out(u) >= g.degree_in(u)))
        .collect();
    let h2: Vec<u32> = h1.iter().map(|&l| 1 - l).collect();
    for h in [&h1, &h2] {
        if let Some(v) = state.evaluate(h) {
            state.best_val = state.best_val.max(v);
        }
    }

    state.dfs(0);
    state.best
}

/// Normalized complex indicator vector of a partition over the non-isolated
/// vertices in id order (matching the Laplacian operator's indexing). The
/// entry at a vertex of cluster j is omega^j sqrt(d_u / (k vol(S_j))), and
/// the whole vector has unit norm.
pub fn indicator_vector(g: &WeightedDigraph, p: &Partition) -> Result<Vec<Complex64>> {
    let k = p.k();
    let root = RootOfUnity::new(k)?;
    let ClusterCuts { vol, sizes, .. } = cluster_cuts(g, p)?;
    for j in 0..k {
        if sizes[j] == 0 {
            return Err(Error::EmptyCluster { index: j });
        }
        if vol[j] <= 0.0 {
            return Err(Error::ZeroVolumeCluster { index: j });
        }
    }
    let scale = 1.0 / (k as f64).sqrt();
    let y: Vec<Complex64> = g
        .active_vertices()
        .into_iter()
        .map(|u| {
            let j = p.label(u).expect("active vertex labeled");
            let magnitude = scale * (g.degree_total(u) / vol[j]).sqrt();
            root.power(j as i64) * magnitude
        })
        .collect();
    Ok(y)
}

/// The quadratic form y* L y written as the closed cut/volume double sum
/// 1 - (1/k) sum_{j,l} 2 w(S_j,S_l) / sqrt(vol_j vol_l) cos(2 pi (l+1-j) / order).
pub fn indicator_quadratic_closed_form(g: &WeightedDigraph, p: &Partition) -> Result<f64> {
    let k = p.k();
    let root = RootOfUnity::new(k)?;
    let ClusterCuts { cut, vol, sizes } = cluster_cuts(g, p)?;
    for j in 0..k {
        if sizes[j] == 0 {
            return Err(Error::EmptyCluster { index: j });
        }
        if vol[j] <= 0.0 {
            return Err(Error::ZeroVolumeCluster { index: j });
        }
    }
    let order = root.order() as f64;
    let mut sum = 0.0;
    for j in 0..k {
        for l in 0..k {
            if cut[j][l] == 0.0 {
                continue;
            }
            let angle = 2.0 * std::f64::consts::PI * (l as f64 + 1.0 - j as f64) / order;
            sum += 2.0 * cut[j][l] / (vol[j] * vol[l]).sqrt() * angle.cos();
        }
    }
    Ok(1.0 - sum / k as f64)
}

/// The eigengap-to-flow signal gamma = lambda_2 / (1 - (4/k) theta).
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct GammaReport {
    pub theta: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub gamma: f64,
    /// Set when theta >= k/4 makes the denominator degenerate.
    pub infinite: bool,
}

pub fn gamma_report(k: usize, theta: f64, lambda1: f64, lambda2: f64) -> GammaReport {
    let denom = 1.0 - (4.0 / k as f64) * theta;
    if denom <= 0.0 {
        GammaReport { theta, lambda1, lambda2, gamma: f64::INFINITY, infinite: true }
    } else {
        GammaReport { theta, lambda1, lambda2, gamma: lambda2 / denom, infinite: false }
    }
}
