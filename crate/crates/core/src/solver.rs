//! Bottom eigenpair of the Hermitian Laplacian.
//!
//! Power iteration on the shifted operator `2I - L` finds the smallest
//! eigenvalue of L (the shift 2 is valid because the spectrum provably lies
//! in [0, 2], so no spectral-radius estimate is needed). The second
//! eigenvalue comes from the same iteration with the converged bottom
//! eigenvector deflated out at every step. A dense eigendecomposition,
//! backed by nalgebra, serves as the oracle for small instances.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermitian::HermitianLaplacian;
use crate::rng::SplitMix64;

/// Guard for the dense eigendecomposition oracle.
pub const DENSE_EIGEN_GUARD: usize = 1024;

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    /// Unit-norm eigenvector over the operator's active vertices, phase
    /// normalized so the largest-magnitude entry is real positive.
    pub vector: Vec<Complex64>,
    /// `||L f - value * f||` at return.
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    /// Residual tolerance for convergence.
    pub tolerance: f64,
    /// `None` computes `max(1000, 10 n ln n)` from the operator size.
    pub max_iterations: Option<usize>,
    /// Seed for the random start vector.
    pub seed: u64,
}

impl SolverConfig {
    pub fn new(seed: u64) -> Self {
        Self { tolerance: 1e-8, max_iterations: None, seed }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = Some(max_iterations);
        self
    }

    fn resolved_max_iterations(&self, n: usize) -> usize {
        self.max_iterations
            .unwrap_or_else(|| (10.0 * n as f64 * (n as f64).ln()).ceil().max(1000.0) as usize)
    }
}

/// Result of the deflated second-eigenvalue solve.
#[derive(Debug, Clone, Copy)]
pub struct SecondEigen {
    pub value: f64,
    pub residual: f64,
    pub iterations: usize,
    /// Set when the two bottom eigenvalues are closer than 1e-6; the
    /// pipeline can still proceed, but eigengap-based quantities are
    /// uninformative.
    pub degenerate_gap: bool,
}

struct PowerState {
    value: f64,
    vector: Vec<Complex64>,
    residual: f64,
    iterations: usize,
}

/// Runs shifted power iteration, optionally deflating against `deflate`.
fn shifted_power_iteration(
    op: &HermitianLaplacian,
    cfg: &SolverConfig,
    deflate: Option<&[Complex64]>,
    seed_salt: u64,
) -> Result<PowerState> {
    let n = op.dim();
    let max_iterations = cfg.resolved_max_iterations(n);
    let mut rng = SplitMix64::new(cfg.seed.wrapping_add(seed_salt));

    let mut x: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.next_signed(), rng.next_signed()))
        .collect();
    // One-shot orthogonalization against the all-equal vector breaks the
    // symmetry of structured instances deterministically.
    let mean = x.iter().sum::<Complex64>() / n as f64;
    for xi in &mut x {
        *xi -= mean;
    }
    if let Some(f) = deflate {
        project_out(&mut x, f);
    }
    normalize(&mut x)?;

    let mut best_residual = f64::INFINITY;
    for it in 1..=max_iterations {
        let lx = op.matvec(&x)?;
        let value: f64 = x
            .iter()
            .zip(&lx)
            .map(|(xi, yi)| (xi.conj() * yi).re)
            .sum();
        let mut residual_sq = 0.0;
        for i in 0..n {
            residual_sq += (lx[i] - value * x[i]).norm_sqr();
        }
        let residual = residual_sq.sqrt();
        best_residual = best_residual.min(residual);
        if residual <= cfg.tolerance {
            return Ok(PowerState { value, vector: x, residual, iterations: it });
        }
        // One step of power iteration on 2I - L.
        let mut next: Vec<Complex64> = (0..n).map(|i| 2.0 * x[i] - lx[i]).collect();
        if let Some(f) = deflate {
            project_out(&mut next, f);
        }
        normalize(&mut next)?;
        x = next;
    }
    Err(Error::NoConvergence { residual: best_residual, iterations: max_iterations })
}

fn project_out(x: &mut [Complex64], f: &[Complex64]) {
    let coeff: Complex64 = f.iter().zip(x.iter()).map(|(fi, xi)| fi.conj() * xi).sum();
    for (xi, fi) in x.iter_mut().zip(f) {
        *xi -= coeff * fi;
    }
}

fn normalize(x: &mut [Complex64]) -> Result<()> {
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-300 {
        return Err(Error::ZeroVector);
    }
    for xi in x.iter_mut() {
        *xi /= norm;
    }
    Ok(())
}

/// Rotates so the largest-magnitude entry is real positive (first such
/// entry wins ties), making eigenvectors reproducible across runs.
pub fn normalize_phase(x: &mut [Complex64]) {
    let mut best = 0usize;
    let mut best_norm = -1.0;
    for (i, z) in x.iter().enumerate() {
        let nz = z.norm_sqr();
        if nz > best_norm {
            best_norm = nz;
            best = i;
        }
    }
    let pivot = x[best];
    if pivot.norm() == 0.0 {
        return;
    }
    let phase = pivot / pivot.norm();
    let rotation = phase.conj();
    for z in x.iter_mut() {
        *z *= rotation;
    }
    x[best] = Complex64::new(x[best].re, 0.0);
}

/// Smallest eigenvalue and eigenvector of L.
pub fn bottom_eigenpair(op: &HermitianLaplacian, cfg: &SolverConfig) -> Result<EigenPair> {
    if op.dim() < 2 {
        return Err(Error::DegenerateOperator { active: op.dim() });
    }
    let mut state = shifted_power_iteration(op, cfg, None, 0)?;
    normalize_phase(&mut state.vector);
    Ok(EigenPair {
        value: state.value,
        vector: state.vector,
        residual: state.residual,
        iterations: state.iterations,
    })
}

/// Smallest eigenvalue of L restricted to the orthogonal complement of the
/// bottom eigenvector.
pub fn second_eigenvalue(
    op: &HermitianLaplacian,
    bottom: &EigenPair,
    cfg: &SolverConfig,
) -> Result<SecondEigen> {
    if op.dim() < 2 {
        return Err(Error::DegenerateOperator { active: op.dim() });
    }
    if bottom.residual > cfg.tolerance {
        return Err(Error::BottomNotConverged {
            residual: bottom.residual,
            tolerance: cfg.tolerance,
        });
    }
    let state = shifted_power_iteration(op, cfg, Some(&bottom.vector), 1)?;
    Ok(SecondEigen {
        value: state.value,
        residual: state.residual,
        iterations: state.iterations,
        degenerate_gap: (state.value - bottom.value).abs() < 1e-6,
    })
}

/// Full dense eigendecomposition, eigenvalues ascending. Test oracle and
/// baseline workhorse; guarded to small operators.
pub fn dense_spectrum(op: &HermitianLaplacian) -> Result<Vec<EigenPair>> {
    let n = op.dim();
    if n > DENSE_EIGEN_GUARD {
        return Err(Error::SizeGuard { what: "dense eigendecomposition", n, max: DENSE_EIGEN_GUARD });
    }
    let dense = op.dense()?;
    let eig = dense.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .expect("eigenvalues are finite")
    });
    let mut pairs = Vec::with_capacity(n);
    for &i in &order {
        let value = eig.eigenvalues[i];
        let mut vector: Vec<Complex64> = eig.eigenvectors.column(i).iter().copied().collect();
        normalize(&mut vector)?;
        normalize_phase(&mut vector);
        let xv = nalgebra::DVector::from_column_slice(&vector);
        let residual = (&dense * &xv - xv.scale(value)).norm();
        pairs.push(EigenPair { value, vector, residual, iterations: 0 });
    }
    Ok(pairs)
}
