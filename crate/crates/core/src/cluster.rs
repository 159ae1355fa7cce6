//! The spectral clustering pipeline: embed, k-means, order.
//!
//! Vertices are embedded in the plane as F(v) = f1(v) / sqrt(d_v), where f1
//! is the bottom eigenvector of the Hermitian Laplacian. Degree-weighted
//! k-means (the cost every guarantee speaks about is degree-weighted, so an
//! unweighted k-means would optimize the wrong objective) splits the plane,
//! and a final pass relabels clusters with the index ordering that
//! maximizes the flow ratio.
//!
//! The eigenvector phase is pinned before embedding (largest entry real
//! positive), so restarts see the same geometry and runs are reproducible
//! byte for byte.

use num_complex::Complex64;

use crate::digraph::WeightedDigraph;
use crate::error::{Error, Result};
use crate::flow::{self, Partition};
use crate::hermitian::{HermitianLaplacian, RootOfUnity};
use crate::rng::{derive_seed, SplitMix64};
use crate::solver::{self, EigenPair, SolverConfig};

/// Planar embedding of the non-isolated vertices.
#[derive(Debug, Clone)]
pub struct Embedding {
    /// F(v) per active vertex, aligned with `active_ids`.
    pub points: Vec<Complex64>,
    /// d_v per active vertex.
    pub degrees: Vec<f64>,
    /// Active index -> original vertex id.
    pub active_ids: Vec<usize>,
    /// Isolated vertices left out of the embedding.
    pub excluded: Vec<usize>,
}

/// k-means output. `labels` carry the flow-chain ordering once
/// [`order_clusters`] has run; `kmeans_labels` keep the raw assignment.
#[derive(Debug, Clone)]
pub struct Clustering {
    pub labels: Vec<Option<u32>>,
    pub kmeans_labels: Vec<Option<u32>>,
    pub k: usize,
    /// Cluster centers aligned with `labels`. Empty for baselines whose
    /// embedding is not planar.
    pub centers: Vec<Complex64>,
    /// Degree-weighted cost against the returned centers.
    pub cost: f64,
    /// `ordering[new_label] = kmeans_label`; identity before ordering.
    pub ordering: Vec<usize>,
}

impl Clustering {
    pub fn to_partition(&self) -> Result<Partition> {
        Partition::new(self.labels.clone(), self.k)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct KMeansConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    /// Convergence threshold on center movement.
    pub tolerance: f64,
}

impl KMeansConfig {
    pub fn new(seed: u64) -> Self {
        Self { restarts: 16, max_iters: 100, seed, tolerance: 1e-10 }
    }
}

/// Pointwise division of the bottom eigenvector by sqrt(d_v).
pub fn spectral_embedding(g: &WeightedDigraph, bottom: &EigenPair) -> Result<Embedding> {
    let active_ids = g.active_vertices();
    if bottom.vector.len() != active_ids.len() {
        return Err(Error::DimensionMismatch {
            expected: active_ids.len(),
            got: bottom.vector.len(),
        });
    }
    let degrees: Vec<f64> = active_ids.iter().map(|&u| g.degree_total(u)).collect();
    let points: Vec<Complex64> = bottom
        .vector
        .iter()
        .zip(&degrees)
        .map(|(f, d)| f / d.sqrt())
        .collect();
    Ok(Embedding { points, degrees, active_ids, excluded: g.isolated_vertices() })
}

/// Row-major n x dim point set for the shared k-means kernel.
pub(crate) struct FlatPoints {
    pub data: Vec<f64>,
    pub dim: usize,
}

impl FlatPoints {
    pub fn len(&self) -> usize {
        if self.dim == 0 { 0 } else { self.data.len() / self.dim }
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

pub(crate) struct KMeansRun {
    pub labels: Vec<u32>,
    /// k x dim, row-major.
    pub centers: Vec<f64>,
    pub cost: f64,
    /// Cost of each restart's k-means++ initialization (Lloyd never
    /// increases cost, so the returned cost is at most every entry).
    pub init_costs: Vec<f64>,
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn count_distinct(points: &FlatPoints) -> usize {
    let mut rows: Vec<Vec<u64>> = (0..points.len())
        .map(|i| points.row(i).iter().map(|x| x.to_bits()).collect())
        .collect();
    rows.sort_unstable();
    rows.dedup();
    rows.len()
}

/// Weighted Lloyd iterations with weighted k-means++ seeding, best of
/// `cfg.restarts` by final cost. Deterministic for a fixed seed.
pub(crate) fn kmeans_nd(
    points: &FlatPoints,
    weights: &[f64],
    k: usize,
    cfg: &KMeansConfig,
) -> Result<KMeansRun> {
    let n = points.len();
    if weights.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: weights.len() });
    }
    let distinct = count_distinct(points);
    if distinct < k {
        return Err(Error::TooFewDistinctPoints { needed: k, found: distinct });
    }

    let mut best: Option<(f64, Vec<u32>, Vec<f64>)> = None;
    let mut init_costs = Vec::with_capacity(cfg.restarts);
    for restart in 0..cfg.restarts.max(1) {
        let mut rng = SplitMix64::new(derive_seed(cfg.seed, restart as u64));
        let mut centers = seed_plus_plus(points, weights, k, &mut rng);
        let (init_labels, init_cost) = assign(points, weights, &centers, k);
        init_costs.push(init_cost);
        let mut labels = init_labels;
        let mut repairs = 0usize;
        let mut abandoned = false;

        for _ in 0..cfg.max_iters {
            let (next_centers, empties) = recompute_centers(points, weights, &labels, k);
            let mut centers_after = next_centers;
            if !empties.is_empty() {
                repairs += 1;
                if repairs > 3 {
                    abandoned = true;
                    break;
                }
                reseed_empty(points, weights, &labels, &mut centers_after, &empties);
            }
            let movement = centers
                .chunks(points.dim)
                .zip(centers_after.chunks(points.dim))
                .map(|(a, b)| dist_sq(a, b))
                .fold(0.0f64, f64::max);
            centers = centers_after;
            let (next_labels, _) = assign(points, weights, &centers, k);
            let unchanged = next_labels == labels;
            labels = next_labels;
            if empties.is_empty() && (movement <= cfg.tolerance * cfg.tolerance || unchanged) {
                break;
            }
        }
        if abandoned {
            continue;
        }
        // Final centers consistent with the final labels.
        let (final_centers, empties) = recompute_centers(points, weights, &labels, k);
        if !empties.is_empty() {
            continue;
        }
        let (final_labels, cost) = assign(points, weights, &final_centers, k);
        let mut counts = vec![0usize; k];
        for &l in &final_labels {
            counts[l as usize] += 1;
        }
        if counts.iter().any(|&c| c == 0) {
            continue;
        }
        if best.as_ref().is_none_or(|(bc, _, _)| cost < *bc) {
            best = Some((cost, final_labels, final_centers));
        }
    }

    let (cost, labels, centers) =
        best.ok_or(Error::EmptyClusterUnrecoverable { restarts: cfg.restarts })?;
    Ok(KMeansRun { labels, centers, cost, init_costs })
}

/// Weighted k-means++: first center drawn proportional to weight, then
/// proportional to weight times squared distance to the nearest center.
fn seed_plus_plus(
    points: &FlatPoints,
    weights: &[f64],
    k: usize,
    rng: &mut SplitMix64,
) -> Vec<f64> {
    let n = points.len();
    let dim = points.dim;
    let mut centers = Vec::with_capacity(k * dim);
    let total_w: f64 = weights.iter().sum();
    let first = sample_cumulative(weights, total_w, rng.next_f64()).unwrap_or(0);
    centers.extend_from_slice(points.row(first));

    let mut min_d2: Vec<f64> = (0..n)
        .map(|i| dist_sq(points.row(i), &centers[0..dim]))
        .collect();
    for _ in 1..k {
        let scores: Vec<f64> = min_d2.iter().zip(weights).map(|(d, w)| d * w).collect();
        let total: f64 = scores.iter().sum();
        let next = if total > 0.0 {
            sample_cumulative(&scores, total, rng.next_f64())
        } else {
            // Every remaining point coincides with a center; take the first
            // point not yet used as one.
            (0..n).find(|&i| {
                centers
                    .chunks(dim)
                    .all(|c| dist_sq(points.row(i), c) > 0.0)
            })
        };
        let next = next.unwrap_or(0);
        let start = centers.len();
        centers.extend_from_slice(points.row(next));
        let new_center = centers[start..start + dim].to_vec();
        for (i, d) in min_d2.iter_mut().enumerate() {
            let cand = dist_sq(points.row(i), &new_center);
            if cand < *d {
                *d = cand;
            }
        }
    }
    centers
}

fn sample_cumulative(scores: &[f64], total: f64, unit: f64) -> Option<usize> {
    if total <= 0.0 {
        return None;
    }
    let target = unit * total;
    let mut acc = 0.0;
    for (i, &s) in scores.iter().enumerate() {
        acc += s;
        if target < acc {
            return Some(i);
        }
    }
    scores.iter().rposition(|&s| s > 0.0)
}

fn assign(points: &FlatPoints, weights: &[f64], centers: &[f64], k: usize) -> (Vec<u32>, f64) {
    let dim = points.dim;
    let mut labels = vec![0u32; points.len()];
    let mut cost = 0.0;
    for i in 0..points.len() {
        let row = points.row(i);
        let mut best_l = 0u32;
        let mut best_d = f64::INFINITY;
        for (l, center) in centers.chunks(dim).enumerate().take(k) {
            let d = dist_sq(row, center);
            if d < best_d {
                best_d = d;
                best_l = l as u32;
            }
        }
        labels[i] = best_l;
        cost += weights[i] * best_d;
    }
    (labels, cost)
}

/// Weighted means per cluster; returns the list of empty clusters.
fn recompute_centers(
    points: &FlatPoints,
    weights: &[f64],
    labels: &[u32],
    k: usize,
) -> (Vec<f64>, Vec<usize>) {
    let dim = points.dim;
    let mut sums = vec![0.0f64; k * dim];
    let mut mass = vec![0.0f64; k];
    for i in 0..points.len() {
        let l = labels[i] as usize;
        mass[l] += weights[i];
        for (d, x) in points.row(i).iter().enumerate() {
            sums[l * dim + d] += weights[i] * x;
        }
    }
    let mut empties = Vec::new();
    for l in 0..k {
        if mass[l] > 0.0 {
            for d in 0..dim {
                sums[l * dim + d] /= mass[l];
            }
        } else {
            empties.push(l);
        }
    }
    (sums, empties)
}

/// Re-seeds each empty center at the point with the largest weighted
/// squared distance to its current center.
fn reseed_empty(
    points: &FlatPoints,
    weights: &[f64],
    labels: &[u32],
    centers: &mut [f64],
    empties: &[usize],
) {
    let dim = points.dim;
    let mut used: Vec<usize> = Vec::new();
    for &empty in empties {
        let mut best_i = 0usize;
        let mut best_score = -1.0;
        for i in 0..points.len() {
            if used.contains(&i) {
                continue;
            }
            let c = labels[i] as usize;
            let score = weights[i] * dist_sq(points.row(i), &centers[c * dim..(c + 1) * dim]);
            if score > best_score {
                best_score = score;
                best_i = i;
            }
        }
        used.push(best_i);
        centers[empty * dim..(empty + 1) * dim].copy_from_slice(points.row(best_i));
    }
}

/// Degree-weighted k-means on the planar embedding.
pub fn weighted_kmeans(emb: &Embedding, k: usize, cfg: &KMeansConfig) -> Result<Clustering> {
    weighted_kmeans_detailed(emb, k, cfg).map(|(c, _)| c)
}

/// Same, also returning the cost of every k-means++ initialization.
pub fn weighted_kmeans_detailed(
    emb: &Embedding,
    k: usize,
    cfg: &KMeansConfig,
) -> Result<(Clustering, Vec<f64>)> {
    let max_active = emb.active_ids.iter().copied().max().map_or(0, |m| m + 1);
    let max_excluded = emb.excluded.iter().copied().max().map_or(0, |m| m + 1);
    let n_total = max_active.max(max_excluded);
    let data: Vec<f64> = emb.points.iter().flat_map(|z| [z.re, z.im]).collect();
    let points = FlatPoints { data, dim: 2 };
    let run = kmeans_nd(&points, &emb.degrees, k, cfg)?;

    let mut labels = vec![None; n_total];
    for (i, &u) in emb.active_ids.iter().enumerate() {
        labels[u] = Some(run.labels[i]);
    }
    let centers: Vec<Complex64> =
        run.centers.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
    let clustering = Clustering {
        kmeans_labels: labels.clone(),
        labels,
        k,
        centers,
        cost: run.cost,
        ordering: (0..k).collect(),
    };
    Ok((clustering, run.init_costs))
}

/// Relabels clusters with the index permutation that maximizes the flow
/// ratio: exhaustive over k! orderings for k <= 8, greedy chain extension
/// beyond. Ties break to the lexicographically smallest permutation.
pub fn order_clusters(g: &WeightedDigraph, c: &Clustering) -> Result<Clustering> {
    let k = c.k;
    let p = Partition::new(c.kmeans_labels.clone(), k)?;
    let cuts = flow::cluster_cuts(g, &p)?;
    let score = |order: &[usize]| -> f64 {
        let mut phi = 0.0;
        for j in 1..k {
            let denom = cuts.vol[order[j]] + cuts.vol[order[j - 1]];
            if denom > 0.0 {
                phi += cuts.cut[order[j]][order[j - 1]] / denom;
            }
        }
        phi
    };

    let ordering = if k <= 8 {
        let mut order: Vec<usize> = (0..k).collect();
        let mut best_order = order.clone();
        let mut best_phi = score(&order);
        while next_permutation(&mut order) {
            let phi = score(&order);
            if phi > best_phi {
                best_phi = phi;
                best_order = order.clone();
            }
        }
        best_order
    } else {
        greedy_chain(&cuts.cut, &cuts.vol, k)
    };

    // inverse[kmeans_label] = new ordered label
    let mut inverse = vec![0u32; k];
    for (new_label, &old) in ordering.iter().enumerate() {
        inverse[old] = new_label as u32;
    }
    let labels: Vec<Option<u32>> = c
        .kmeans_labels
        .iter()
        .map(|l| l.map(|l| inverse[l as usize]))
        .collect();
    let centers = if c.centers.len() == k {
        ordering.iter().map(|&old| c.centers[old]).collect()
    } else {
        Vec::new()
    };
    Ok(Clustering {
        labels,
        kmeans_labels: c.kmeans_labels.clone(),
        k,
        centers,
        cost: c.cost,
        ordering,
    })
}

/// Lexicographic next permutation; false once the sequence wraps.
fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

fn greedy_chain(cut: &[Vec<f64>], vol: &[f64], k: usize) -> Vec<usize> {
    let gain = |a: usize, b: usize| -> f64 {
        let denom = vol[a] + vol[b];
        if denom > 0.0 { cut[a][b] / denom } else { 0.0 }
    };
    // Best starting pair (source a directly above sink b).
    let (mut best_a, mut best_b, mut best_gain) = (1usize, 0usize, f64::NEG_INFINITY);
    for a in 0..k {
        for b in 0..k {
            if a != b {
                let g = gain(a, b);
                if g > best_gain {
                    best_gain = g;
                    best_a = a;
                    best_b = b;
                }
            }
        }
    }
    let mut chain = vec![best_b, best_a]; // bottom to top
    let mut used = vec![false; k];
    used[best_a] = true;
    used[best_b] = true;
    while chain.len() < k {
        let head = *chain.last().unwrap();
        let tail = chain[0];
        let mut best: Option<(f64, bool, usize)> = None;
        for c in 0..k {
            if used[c] {
                continue;
            }
            let head_gain = gain(c, head);
            let tail_gain = gain(tail, c);
            let (g, at_head) =
                if head_gain >= tail_gain { (head_gain, true) } else { (tail_gain, false) };
            if best.as_ref().is_none_or(|&(bg, _, _)| g > bg) {
                best = Some((g, at_head, c));
            }
        }
        let (_, at_head, c) = best.expect("unused cluster exists");
        used[c] = true;
        if at_head {
            chain.push(c);
        } else {
            chain.insert(0, c);
        }
    }
    chain
}

/// Diagnostics emitted by a full pipeline run.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SimpleHermDiagnostics {
    pub k: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub residual1: f64,
    pub residual2: f64,
    pub iterations1: usize,
    pub iterations2: usize,
    pub degenerate_gap: bool,
    pub cost: f64,
    pub phi: f64,
    pub isolated: usize,
    pub solver_seed: u64,
    pub kmeans_seed: u64,
}

/// Bottom eigenpair -> embedding -> weighted k-means -> cluster ordering.
pub fn simple_herm(
    g: &WeightedDigraph,
    k: usize,
    solver_cfg: &SolverConfig,
    kmeans_cfg: &KMeansConfig,
) -> Result<(Clustering, SimpleHermDiagnostics)> {
    let active = g.active_vertices().len();
    if active < k {
        return Err(Error::TooFewVertices { active, k });
    }
    let op = HermitianLaplacian::new(g, k)?;
    let bottom = solver::bottom_eigenpair(&op, solver_cfg)?;
    let second = solver::second_eigenvalue(&op, &bottom, solver_cfg)?;
    let emb = spectral_embedding(g, &bottom)?;
    let clustering = weighted_kmeans(&emb, k, kmeans_cfg)?;
    let ordered = order_clusters(g, &clustering)?;
    let phi = flow::flow_ratio(g, &ordered.to_partition()?)?.phi;
    let diagnostics = SimpleHermDiagnostics {
        k,
        lambda1: bottom.value,
        lambda2: second.value,
        residual1: bottom.residual,
        residual2: second.residual,
        iterations1: bottom.iterations,
        iterations2: second.iterations,
        degenerate_gap: second.degenerate_gap,
        cost: ordered.cost,
        phi,
        isolated: g.vertex_count() - active,
        solver_seed: solver_cfg.seed,
        kmeans_seed: kmeans_cfg.seed,
    };
    Ok((ordered, diagnostics))
}

/// Analytic cluster centers induced by a partition: scale / sqrt(vol(S_j))
/// at phase omega^j, where scale = beta / sqrt(k).
pub fn partition_centers(
    g: &WeightedDigraph,
    p: &Partition,
    beta: Complex64,
) -> Result<Vec<Complex64>> {
    let k = p.k();
    let root = RootOfUnity::new(k)?;
    let cuts = flow::cluster_cuts(g, p)?;
    let scale = beta / (k as f64).sqrt();
    (0..k)
        .map(|j| {
            if cuts.vol[j] <= 0.0 {
                return Err(Error::ZeroVolumeCluster { index: j });
            }
            Ok(scale * root.power(j as i64) / cuts.vol[j].sqrt())
        })
        .collect()
}

/// Both sides of the center-cost identity: the degree-weighted distance of
/// the embedding to the analytic centers (lhs) equals ||f1 - beta y||^2
/// (rhs), with beta the reciprocal projection coefficient 1 / <f1, y>.
/// Returned separately so callers assert the equality at their tolerance.
pub fn center_cost_identity(
    g: &WeightedDigraph,
    p: &Partition,
    f1: &[Complex64],
    y: &[Complex64],
) -> Result<(f64, f64)> {
    let active = g.active_vertices();
    if f1.len() != active.len() {
        return Err(Error::DimensionMismatch { expected: active.len(), got: f1.len() });
    }
    if y.len() != active.len() {
        return Err(Error::DimensionMismatch { expected: active.len(), got: y.len() });
    }
    let alpha: Complex64 = f1.iter().zip(y).map(|(f, yi)| f.conj() * yi).sum();
    if alpha.norm() == 0.0 {
        return Err(Error::ZeroProjection);
    }
    let beta = Complex64::new(1.0, 0.0) / alpha;
    let centers = partition_centers(g, p, beta)?;

    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for (a, &u) in active.iter().enumerate() {
        let d = g.degree_total(u);
        let j = p.label(u).ok_or(Error::UnlabeledVertex { id: u })?;
        let embedded = f1[a] / d.sqrt();
        lhs += d * (embedded - centers[j]).norm_sqr();
        rhs += (f1[a] - beta * y[a]).norm_sqr();
    }
    Ok((lhs, rhs))
}
