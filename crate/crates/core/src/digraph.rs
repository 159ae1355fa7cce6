//! Sparse weighted digraph with degree, volume, and cut queries.
//!
//! The graph is immutable after construction. Degrees are precomputed and
//! the edge list is kept in both out-adjacency and in-adjacency compressed
//! forms, since every downstream module reads them in hot loops.
//!
//! Vertices with zero total degree are retained but flagged as isolated;
//! the spectral modules exclude them (the normalized Laplacian is undefined
//! there) and report them as an isolated cluster in outputs.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Guard for materializing an n-by-n dense matrix.
pub const DENSE_GUARD: usize = 4096;

/// Dense adjacency matrix with `M[(u, v)] = w(u, v)`.
pub type DenseAdjacency = DMatrix<f64>;

/// How reciprocal pairs and duplicate edges are merged at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MergePolicy {
    /// Error on any reciprocal pair or duplicate ordered pair.
    Reject,
    /// Keep one edge per pair in the heavier direction with weight
    /// `|w(u,v) - w(v,u)|`; duplicate same-direction edges sum first.
    Net,
    /// Keep both directions; duplicate same-direction edges sum.
    Sum,
}

impl std::str::FromStr for MergePolicy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "reject" => Ok(Self::Reject),
            "net" => Ok(Self::Net),
            "sum" => Ok(Self::Sum),
            other => Err(format!("unknown merge policy {other:?} (expected reject|net|sum)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
}

/// Counters collected while building a graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct BuildDiagnostics {
    pub self_loops_dropped: usize,
    pub zero_weight_dropped: usize,
    /// Reciprocal pairs merged under the `net` policy (including pairs that
    /// netted to zero and vanished).
    pub netted_pairs: usize,
}

#[derive(Debug, Clone)]
pub struct WeightedDigraph {
    n: usize,
    /// Sorted by (src, dst); at most one entry per ordered pair.
    edges: Vec<(usize, usize, f64)>,
    out_offsets: Vec<usize>,
    out_targets: Vec<(usize, f64)>,
    in_offsets: Vec<usize>,
    in_sources: Vec<(usize, f64)>,
    d_out: Vec<f64>,
    d_in: Vec<f64>,
    d_total: Vec<f64>,
    total_weight: f64,
    diagnostics: BuildDiagnostics,
}

impl PartialEq for WeightedDigraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl WeightedDigraph {
    /// Builds a graph from (src, dst, weight) triples.
    ///
    /// Self-loops and zero-weight edges are dropped (counted in the
    /// diagnostics); reciprocal pairs are merged per `policy`. Under
    /// `Reject`, duplicate ordered pairs are errors too.
    pub fn from_edge_list(
        triples: &[(usize, usize, f64)],
        n: usize,
        policy: MergePolicy,
    ) -> Result<Self> {
        let mut diagnostics = BuildDiagnostics::default();
        let mut map: std::collections::BTreeMap<(usize, usize), f64> =
            std::collections::BTreeMap::new();

        for &(u, v, w) in triples {
            if u >= n {
                return Err(Error::VertexOutOfRange { id: u, n });
            }
            if v >= n {
                return Err(Error::VertexOutOfRange { id: v, n });
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidWeight { src: u, dst: v, weight: w });
            }
            if u == v {
                diagnostics.self_loops_dropped += 1;
                continue;
            }
            if w == 0.0 {
                diagnostics.zero_weight_dropped += 1;
                continue;
            }
            match map.entry((u, v)) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(w);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    if policy == MergePolicy::Reject {
                        return Err(Error::DuplicateEdge { u, v });
                    }
                    *e.get_mut() += w;
                }
            }
        }

        // Merge reciprocal pairs.
        let mut edges: Vec<(usize, usize, f64)> = Vec::with_capacity(map.len());
        for (&(u, v), &w) in &map {
            if u < v {
                match map.get(&(v, u)) {
                    None => edges.push((u, v, w)),
                    Some(&back) => match policy {
                        MergePolicy::Reject => return Err(Error::ReciprocalPair { u, v }),
                        MergePolicy::Sum => {
                            edges.push((u, v, w));
                            edges.push((v, u, back));
                        }
                        MergePolicy::Net => {
                            diagnostics.netted_pairs += 1;
                            if w > back {
                                edges.push((u, v, w - back));
                            } else if back > w {
                                edges.push((v, u, back - w));
                            }
                            // Equal weights net to zero: the pair vanishes.
                        }
                    },
                }
            } else if !map.contains_key(&(v, u)) {
                edges.push((u, v, w));
            }
        }
        edges.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

        Ok(Self::from_clean_edges(edges, n, diagnostics))
    }

    fn from_clean_edges(
        edges: Vec<(usize, usize, f64)>,
        n: usize,
        diagnostics: BuildDiagnostics,
    ) -> Self {
        let mut d_out = vec![0.0; n];
        let mut d_in = vec![0.0; n];
        let mut total_weight = 0.0;
        for &(u, v, w) in &edges {
            d_out[u] += w;
            d_in[v] += w;
            total_weight += w;
        }
        let d_total: Vec<f64> = d_out.iter().zip(&d_in).map(|(o, i)| o + i).collect();

        let mut out_offsets = vec![0usize; n + 1];
        let mut in_offsets = vec![0usize; n + 1];
        for &(u, v, _) in &edges {
            out_offsets[u + 1] += 1;
            in_offsets[v + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
            in_offsets[i + 1] += in_offsets[i];
        }
        let mut out_targets = vec![(0usize, 0.0); edges.len()];
        let mut in_sources = vec![(0usize, 0.0); edges.len()];
        let mut out_fill = out_offsets.clone();
        let mut in_fill = in_offsets.clone();
        for &(u, v, w) in &edges {
            out_targets[out_fill[u]] = (v, w);
            out_fill[u] += 1;
            in_sources[in_fill[v]] = (u, w);
            in_fill[v] += 1;
        }

        Self {
            n,
            edges,
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
            d_out,
            d_in,
            d_total,
            total_weight,
            diagnostics,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges sorted by (src, dst).
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// Outgoing (dst, weight) pairs of `u`, sorted by dst.
    pub fn out_edges(&self, u: usize) -> &[(usize, f64)] {
        &self.out_targets[self.out_offsets[u]..self.out_offsets[u + 1]]
    }

    /// Incoming (src, weight) pairs of `u`, sorted by src.
    pub fn in_edges(&self, u: usize) -> &[(usize, f64)] {
        &self.in_sources[self.in_offsets[u]..self.in_offsets[u + 1]]
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        self.out_edges(u)
            .binary_search_by(|&(dst, _)| dst.cmp(&v))
            .ok()
            .map(|i| self.out_edges(u)[i].1)
    }

    pub fn degree_out(&self, u: usize) -> f64 {
        self.d_out[u]
    }

    pub fn degree_in(&self, u: usize) -> f64 {
        self.d_in[u]
    }

    pub fn degree_total(&self, u: usize) -> f64 {
        self.d_total[u]
    }

    pub fn degrees_total(&self) -> &[f64] {
        &self.d_total
    }

    pub fn is_isolated(&self, u: usize) -> bool {
        self.d_total[u] == 0.0
    }

    pub fn isolated_vertices(&self) -> Vec<usize> {
        (0..self.n).filter(|&u| self.is_isolated(u)).collect()
    }

    /// Non-isolated vertices in id order.
    pub fn active_vertices(&self) -> Vec<usize> {
        (0..self.n).filter(|&u| !self.is_isolated(u)).collect()
    }

    pub fn diagnostics(&self) -> &BuildDiagnostics {
        &self.diagnostics
    }

    /// Sum of total degrees over the set.
    pub fn volume(&self, s: &VertexSet) -> f64 {
        s.members().iter().map(|&u| self.d_total[u]).sum()
    }

    /// Directed cut weight from `s` to `t`. The sets must be disjoint;
    /// `cut_weight(s, t)` and `cut_weight(t, s)` are independent quantities.
    pub fn cut_weight(&self, s: &VertexSet, t: &VertexSet) -> Result<f64> {
        for &u in s.members() {
            if t.contains(u) {
                return Err(Error::OverlappingSets { id: u });
            }
        }
        let mut sum = 0.0;
        for &u in s.members() {
            for &(v, w) in self.out_edges(u) {
                if t.contains(v) {
                    sum += w;
                }
            }
        }
        Ok(sum)
    }

    pub fn dense_adjacency(&self) -> Result<DenseAdjacency> {
        if self.n > DENSE_GUARD {
            return Err(Error::SizeGuard { what: "dense adjacency", n: self.n, max: DENSE_GUARD });
        }
        let mut m = DMatrix::zeros(self.n, self.n);
        for &(u, v, w) in &self.edges {
            m[(u, v)] = w;
        }
        Ok(m)
    }
}

/// A subset of 0..n with O(1) membership tests.
#[derive(Debug, Clone)]
pub struct VertexSet {
    bits: Vec<u64>,
    members: Vec<usize>,
}

impl VertexSet {
    pub fn new(n: usize, ids: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut bits = vec![0u64; n.div_ceil(64)];
        let mut members = Vec::new();
        for id in ids {
            if id >= n {
                return Err(Error::VertexOutOfRange { id, n });
            }
            let (word, bit) = (id / 64, 1u64 << (id % 64));
            if bits[word] & bit != 0 {
                return Err(Error::OverlappingSets { id });
            }
            bits[word] |= bit;
            members.push(id);
        }
        members.sort_unstable();
        Ok(Self { bits, members })
    }

    pub fn full(n: usize) -> Self {
        Self::new(n, 0..n).expect("full set is valid")
    }

    pub fn contains(&self, u: usize) -> bool {
        self.bits
            .get(u / 64)
            .is_some_and(|w| w & (1u64 << (u % 64)) != 0)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members in ascending id order.
    pub fn members(&self) -> &[usize] {
        &self.members
    }
}
