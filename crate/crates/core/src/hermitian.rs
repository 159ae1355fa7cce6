//! Complex Hermitian adjacency and the normalized Laplacian operator.
//!
//! An edge u -> v of weight w enters the Hermitian adjacency as
//! `A[u][v] = w * omega` and `A[v][u] = w * conj(omega)`, where `omega` is
//! the ceil(2*pi*k)-th root of unity for cluster count k. The normalized
//! Laplacian `L = I - D^{-1/2} A D^{-1/2}` is Hermitian with real spectrum
//! in [0, 2]; its bottom eigenvector carries the flow-chain structure.
//!
//! The operator is matrix-free: a matvec walks the edge list once. Isolated
//! vertices are compacted out through an index map held by the operator (L
//! is undefined where d = 0); a graph with no edges at all degenerates to
//! the identity operator over every vertex.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::digraph::WeightedDigraph;
use crate::error::{Error, Result};

/// Guard for materializing the dense Laplacian.
pub const DENSE_LAPLACIAN_GUARD: usize = 4096;

/// The ceil(2*pi*k)-th root of unity used to phase-encode edge direction.
#[derive(Debug, Clone, Copy)]
pub struct RootOfUnity {
    k: usize,
    order: u32,
    value: Complex64,
}

impl RootOfUnity {
    pub fn new(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::KTooSmall { k });
        }
        let order = (2.0 * std::f64::consts::PI * k as f64).ceil() as u32;
        let value = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / order as f64);
        Ok(Self { k, order, value })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    /// `omega^j`, computed from the angle directly so large powers stay on
    /// the unit circle.
    pub fn power(&self, j: i64) -> Complex64 {
        Complex64::from_polar(
            1.0,
            2.0 * std::f64::consts::PI * j as f64 / self.order as f64,
        )
    }
}

#[derive(Debug, Clone)]
pub struct HermitianLaplacian<'g> {
    graph: &'g WeightedDigraph,
    root: RootOfUnity,
    /// active index -> original vertex id
    active: Vec<usize>,
    /// original vertex id -> active index
    index_of: Vec<Option<u32>>,
    /// 1/sqrt(d_u) per active vertex (unused by the identity fallback)
    inv_sqrt_degree: Vec<f64>,
    /// (active src, active dst, w / sqrt(d_src * d_dst)) per edge
    edges: Vec<(u32, u32, f64)>,
}

impl<'g> HermitianLaplacian<'g> {
    pub fn new(graph: &'g WeightedDigraph, k: usize) -> Result<Self> {
        let root = RootOfUnity::new(k)?;
        let n = graph.vertex_count();

        // No edges: L = I - 0 over every vertex.
        if graph.edge_count() == 0 {
            return Ok(Self {
                graph,
                root,
                active: (0..n).collect(),
                index_of: (0..n).map(|u| Some(u as u32)).collect(),
                inv_sqrt_degree: vec![1.0; n],
                edges: Vec::new(),
            });
        }

        let active = graph.active_vertices();
        let mut index_of = vec![None; n];
        for (i, &u) in active.iter().enumerate() {
            index_of[u] = Some(i as u32);
        }
        let inv_sqrt_degree: Vec<f64> = active
            .iter()
            .map(|&u| 1.0 / graph.degree_total(u).sqrt())
            .collect();
        let edges: Vec<(u32, u32, f64)> = graph
            .edges()
            .iter()
            .map(|&(u, v, w)| {
                let au = index_of[u].expect("edge endpoint has positive degree");
                let av = index_of[v].expect("edge endpoint has positive degree");
                let nw = w * inv_sqrt_degree[au as usize] * inv_sqrt_degree[av as usize];
                (au, av, nw)
            })
            .collect();

        Ok(Self { graph, root, active, index_of, inv_sqrt_degree, edges })
    }

    pub fn graph(&self) -> &'g WeightedDigraph {
        self.graph
    }

    pub fn root(&self) -> &RootOfUnity {
        &self.root
    }

    pub fn k(&self) -> usize {
        self.root.k
    }

    /// Number of vertices the operator acts on.
    pub fn dim(&self) -> usize {
        self.active.len()
    }

    /// Active index -> original vertex id.
    pub fn active_ids(&self) -> &[usize] {
        &self.active
    }

    pub fn index_of(&self, original: usize) -> Option<usize> {
        self.index_of[original].map(|i| i as usize)
    }

    pub fn inv_sqrt_degrees(&self) -> &[f64] {
        &self.inv_sqrt_degree
    }

    /// `L x`, computed edge by edge without materializing L.
    pub fn matvec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        let omega = self.root.value;
        let omega_bar = omega.conj();
        let mut y = x.to_vec();
        for &(u, v, nw) in &self.edges {
            let (u, v) = (u as usize, v as usize);
            y[u] -= nw * omega * x[v];
            y[v] -= nw * omega_bar * x[u];
        }
        Ok(y)
    }

    /// Rayleigh quotient x*Lx / x*x, a real number in [0, 2].
    pub fn rayleigh_quotient(&self, x: &[Complex64]) -> Result<f64> {
        let norm_sq: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq == 0.0 {
            return Err(Error::ZeroVector);
        }
        let lx = self.matvec(x)?;
        let quad: Complex64 = x.iter().zip(&lx).map(|(xi, yi)| xi.conj() * yi).sum();
        let q = quad / norm_sq;
        assert!(
            q.im.abs() < 1e-10,
            "Hermitian quadratic form has imaginary part {:.3e}",
            q.im
        );
        Ok(q.re)
    }

    /// Entrywise materialization of L over the active vertices.
    pub fn dense(&self) -> Result<DMatrix<Complex64>> {
        let n = self.dim();
        if n > DENSE_LAPLACIAN_GUARD {
            return Err(Error::SizeGuard {
                what: "dense Laplacian",
                n,
                max: DENSE_LAPLACIAN_GUARD,
            });
        }
        let mut m = DMatrix::from_diagonal_element(n, n, Complex64::new(1.0, 0.0));
        let omega = self.root.value;
        for &(u, v, nw) in &self.edges {
            m[(u as usize, v as usize)] -= nw * omega;
            m[(v as usize, u as usize)] -= nw * omega.conj();
        }
        Ok(m)
    }
}
