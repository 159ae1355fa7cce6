//! Clustering quality metrics and the two comparison baselines.
//!
//! The adjusted Rand index is computed from the contingency table with all
//! pair counting done in integers, so symmetry and relabel invariance hold
//! exactly. Cluster correspondence between two labelings is an optimal
//! assignment on the k-by-k disagreement matrix (Hungarian, O(k^3)), with
//! unmatched clusters counted wholly in the symmetric difference.
//!
//! The baselines follow their published descriptions at face value: DD-SYM
//! clusters the top k random-walk eigenvectors of M^T M + M M^T, Herm-RW
//! clusters the top ceil(k/2) eigenvectors (by magnitude) of the
//! degree-normalized imaginary-unit adjacency. They are baseline-grade
//! reimplementations for comparative trends, not reference ports.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::cluster::{kmeans_nd, Clustering, FlatPoints, KMeansConfig};
use crate::digraph::WeightedDigraph;
use crate::error::{Error, Result};
use crate::flow::Partition;

/// Guard for the baselines' dense eigendecompositions.
pub const BASELINE_GUARD: usize = 2048;

/// Vertex co-occurrence counts between two labelings, over the vertices
/// labeled in both.
#[derive(Debug, Clone)]
pub struct ContingencyTable {
    pub counts: Vec<Vec<u64>>,
    pub row_sums: Vec<u64>,
    pub col_sums: Vec<u64>,
    pub total: u64,
}

pub fn contingency(a: &Partition, b: &Partition) -> Result<ContingencyTable> {
    if a.len() != b.len() {
        return Err(Error::PartitionMismatch { a: a.len(), b: b.len() });
    }
    let (ka, kb) = (a.k(), b.k());
    let mut counts = vec![vec![0u64; kb]; ka];
    for u in 0..a.len() {
        if let (Some(la), Some(lb)) = (a.label(u), b.label(u)) {
            counts[la][lb] += 1;
        }
    }
    let row_sums: Vec<u64> = counts.iter().map(|r| r.iter().sum()).collect();
    let col_sums: Vec<u64> =
        (0..kb).map(|j| counts.iter().map(|r| r[j]).sum()).collect();
    let total = row_sums.iter().sum();
    Ok(ContingencyTable { counts, row_sums, col_sums, total })
}

fn choose2(n: u64) -> u128 {
    let n = n as u128;
    n * n.saturating_sub(1) / 2
}

/// Chance-adjusted pair-counting agreement in [-1, 1]; 1 exactly when the
/// labelings agree up to relabeling.
pub fn adjusted_rand_index(a: &Partition, b: &Partition) -> Result<f64> {
    let table = contingency(a, b)?;
    let sum_cells: u128 = table.counts.iter().flatten().map(|&c| choose2(c)).sum();
    let sum_rows: u128 = table.row_sums.iter().map(|&c| choose2(c)).sum();
    let sum_cols: u128 = table.col_sums.iter().map(|&c| choose2(c)).sum();
    let pairs = choose2(table.total);
    if pairs == 0 {
        return Ok(1.0);
    }
    let expected = sum_rows as f64 * sum_cols as f64 / pairs as f64;
    let max_index = (sum_rows as f64 + sum_cols as f64) / 2.0;
    if max_index == expected {
        // Both labelings are trivial (all-singletons or all-in-one).
        return Ok(1.0);
    }
    Ok((sum_cells as f64 - expected) / (max_index - expected))
}

/// Minimum-cost assignment on a square matrix via shortest augmenting
/// paths with potentials. Returns row -> column and the total cost.
pub(crate) fn min_cost_assignment(cost: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let n = cost.len();
    if n == 0 {
        return (Vec::new(), 0.0);
    }
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut matched = vec![0usize; n + 1]; // matched[j] = row at column j (1-based, 0 = free)
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched[j0] = matched[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![usize::MAX; n];
    for j in 1..=n {
        if matched[j] != 0 {
            row_to_col[matched[j] - 1] = j - 1;
        }
    }
    let total = row_to_col.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
    (row_to_col, total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchWeight {
    Count,
    Volume,
}

/// Optimal cluster correspondence between two labelings.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MatchingResult {
    /// For each cluster of `a`, the matched cluster of `b` (None when the
    /// cluster counts differ and this one went unmatched).
    pub permutation: Vec<Option<usize>>,
    /// Total symmetric difference under the best correspondence, in
    /// vertices or volume per the weighting.
    pub total_symmetric_difference: f64,
}

/// Bijection between cluster labels minimizing the total symmetric
/// difference, over the vertices labeled in both partitions. With unequal
/// cluster counts, min(k_a, k_b) clusters are matched and the rest count
/// wholly toward the difference.
pub fn best_matching(
    a: &Partition,
    b: &Partition,
    weight: MatchWeight,
    g: Option<&WeightedDigraph>,
) -> Result<MatchingResult> {
    if a.len() != b.len() {
        return Err(Error::PartitionMismatch { a: a.len(), b: b.len() });
    }
    let vertex_weight = |u: usize| -> Result<f64> {
        match weight {
            MatchWeight::Count => Ok(1.0),
            MatchWeight::Volume => {
                let g = g.ok_or(Error::VolumeNeedsGraph)?;
                Ok(g.degree_total(u))
            }
        }
    };
    let (ka, kb) = (a.k(), b.k());
    let mut mass = vec![vec![0.0f64; kb]; ka];
    let mut row_mass = vec![0.0f64; ka];
    let mut col_mass = vec![0.0f64; kb];
    for u in 0..a.len() {
        if let (Some(la), Some(lb)) = (a.label(u), b.label(u)) {
            let w = vertex_weight(u)?;
            mass[la][lb] += w;
            row_mass[la] += w;
            col_mass[lb] += w;
        }
    }
    let size = ka.max(kb);
    let mut cost = vec![vec![0.0f64; size]; size];
    for (i, row) in cost.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = match (i < ka, j < kb) {
                (true, true) => row_mass[i] + col_mass[j] - 2.0 * mass[i][j],
                (true, false) => row_mass[i],
                (false, true) => col_mass[j],
                (false, false) => 0.0,
            };
        }
    }
    let (row_to_col, total) = min_cost_assignment(&cost);
    let permutation = (0..ka)
        .map(|i| {
            let j = row_to_col[i];
            (j < kb).then_some(j)
        })
        .collect();
    Ok(MatchingResult { permutation, total_symmetric_difference: total })
}

/// Best-matching totals between consecutive snapshots. Vertices unlabeled
/// in either snapshot of a pair are excluded from that pair; volume mode
/// uses `graphs[i]` (the earlier snapshot's graph) for pair i.
pub fn drift_series(
    snapshots: &[Partition],
    weight: MatchWeight,
    graphs: Option<&[&WeightedDigraph]>,
) -> Result<Vec<f64>> {
    if snapshots.len() < 2 {
        return Err(Error::TooFewSnapshots { got: snapshots.len() });
    }
    let mut series = Vec::with_capacity(snapshots.len() - 1);
    for i in 0..snapshots.len() - 1 {
        let g = graphs.map(|gs| gs[i]);
        let m = best_matching(&snapshots[i], &snapshots[i + 1], weight, g)?;
        series.push(m.total_symmetric_difference);
    }
    Ok(series)
}

fn baseline_clustering(
    g: &WeightedDigraph,
    active: &[usize],
    labels_active: &[u32],
    k: usize,
    cost: f64,
) -> Clustering {
    let mut labels = vec![None; g.vertex_count()];
    for (i, &u) in active.iter().enumerate() {
        labels[u] = Some(labels_active[i]);
    }
    Clustering {
        kmeans_labels: labels.clone(),
        labels,
        k,
        centers: Vec::new(),
        cost,
        ordering: (0..k).collect(),
    }
}

/// Spectral clustering on the symmetrized similarity M^T M + M M^T with
/// the top k eigenvectors of its random-walk normalization.
pub fn dd_sym_baseline(
    g: &WeightedDigraph,
    k: usize,
    cfg: &KMeansConfig,
) -> Result<Clustering> {
    let n = g.vertex_count();
    if n > BASELINE_GUARD {
        return Err(Error::SizeGuard { what: "dd-sym baseline", n, max: BASELINE_GUARD });
    }
    let active = g.active_vertices();
    let na = active.len();
    if na < k {
        return Err(Error::TooFewVertices { active: na, k });
    }
    let mut m = DMatrix::<f64>::zeros(na, na);
    let mut index_of = vec![usize::MAX; n];
    for (i, &u) in active.iter().enumerate() {
        index_of[u] = i;
    }
    for &(u, v, w) in g.edges() {
        m[(index_of[u], index_of[v])] = w;
    }
    let a = m.transpose() * &m + &m * m.transpose();
    // Diagonal of A is positive exactly on vertices with any edge, so no
    // further zero-degree rows appear here.
    let d: Vec<f64> = (0..na).map(|i| a.row(i).sum()).collect();
    let d_inv_sqrt: Vec<f64> = d.iter().map(|&x| 1.0 / x.sqrt()).collect();
    let sym = DMatrix::from_fn(na, na, |i, j| a[(i, j)] * d_inv_sqrt[i] * d_inv_sqrt[j]);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..na).collect();
    order.sort_by(|&x, &y| {
        eig.eigenvalues[y].partial_cmp(&eig.eigenvalues[x]).expect("finite").then(x.cmp(&y))
    });
    let top: Vec<usize> = order.into_iter().take(k).collect();

    let mut data = vec![0.0f64; na * k];
    for (col, &e) in top.iter().enumerate() {
        for i in 0..na {
            // Random-walk eigenvector: D^{-1/2} times the symmetric one.
            data[i * k + col] = d_inv_sqrt[i] * eig.eigenvectors[(i, e)];
        }
    }
    let points = FlatPoints { data, dim: k };
    let run = kmeans_nd(&points, &vec![1.0; na], k, cfg)?;
    Ok(baseline_clustering(g, &active, &run.labels, k, run.cost))
}

/// Spectral clustering on the imaginary-unit Hermitian adjacency with the
/// top ceil(k/2) eigenvectors by eigenvalue magnitude of the random-walk
/// normalization; real and imaginary parts stack into the embedding.
pub fn herm_rw_baseline(
    g: &WeightedDigraph,
    k: usize,
    cfg: &KMeansConfig,
) -> Result<Clustering> {
    let n = g.vertex_count();
    if n > BASELINE_GUARD {
        return Err(Error::SizeGuard { what: "herm-rw baseline", n, max: BASELINE_GUARD });
    }
    let active = g.active_vertices();
    let na = active.len();
    if na < k {
        return Err(Error::TooFewVertices { active: na, k });
    }
    let mut index_of = vec![usize::MAX; n];
    for (i, &u) in active.iter().enumerate() {
        index_of[u] = i;
    }
    let mut h = DMatrix::<Complex64>::zeros(na, na);
    for &(u, v, w) in g.edges() {
        let (i, j) = (index_of[u], index_of[v]);
        h[(i, j)] += Complex64::new(0.0, w);
        h[(j, i)] += Complex64::new(0.0, -w);
    }
    let d_inv_sqrt: Vec<f64> =
        active.iter().map(|&u| 1.0 / g.degree_total(u).sqrt()).collect();
    let norm = DMatrix::from_fn(na, na, |i, j| h[(i, j)] * (d_inv_sqrt[i] * d_inv_sqrt[j]));
    let eig = norm.symmetric_eigen();
    let mut order: Vec<usize> = (0..na).collect();
    order.sort_by(|&x, &y| {
        let (ax, ay) = (eig.eigenvalues[x].abs(), eig.eigenvalues[y].abs());
        ay.partial_cmp(&ax)
            .expect("finite")
            .then(eig.eigenvalues[y].partial_cmp(&eig.eigenvalues[x]).expect("finite"))
            .then(x.cmp(&y))
    });
    let picked: Vec<usize> = order.into_iter().take(k.div_ceil(2)).collect();

    let dim = 2 * picked.len();
    let mut data = vec![0.0f64; na * dim];
    for (col, &e) in picked.iter().enumerate() {
        for i in 0..na {
            let z = eig.eigenvectors[(i, e)] * d_inv_sqrt[i];
            data[i * dim + 2 * col] = z.re;
            data[i * dim + 2 * col + 1] = z.im;
        }
    }
    let points = FlatPoints { data, dim };
    let run = kmeans_nd(&points, &vec![1.0; na], k, cfg)?;
    Ok(baseline_clustering(g, &active, &run.labels, k, run.cost))
}
