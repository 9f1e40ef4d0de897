//! Diffusion operator and its leading eigenvectors.
//!
//! `P = Q⁻¹ K` is row stochastic with `Q = diag(q)`, `q(i) = Σ_j K(i, j)`.
//! It is similar to the symmetric `A = Q^{-1/2} K Q^{-1/2}`, so eigenvectors
//! `φ` of `A` give eigenvectors `ψ = Q^{-1/2} φ` of `P` with the same
//! eigenvalue. Only the `α = 0` normalization is provided.

use alloc::vec;
use alloc::vec::Vec;

use crate::kernel::SparseAffinity;
use crate::krylov::{largest_eigenpairs, KrylovOptions};
use crate::linalg::{axpy, dot, norm2, CsrMatrix, SymmetricOperator};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionOperator {
    kernel: SparseAffinity,
    degrees: Vec<f64>,
}

impl DiffusionOperator {
    pub fn kernel(&self) -> &SparseAffinity {
        &self.kernel
    }

    /// Row sums `q`.
    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    /// `y = P x`
    pub fn apply_markov(&self, x: &[f64], y: &mut [f64]) {
        self.kernel.matrix().mul_vec(x, y);
        for (yi, qi) in y.iter_mut().zip(&self.degrees) {
            *yi /= qi;
        }
    }

    /// Row sums of `P`; one up to rounding.
    pub fn markov_row_sums(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| {
                let (_, vals) = self.kernel.matrix().row(i);
                vals.iter().map(|v| v / self.degrees[i]).sum()
            })
            .collect()
    }
}

/// Compute the degree vector; every row must have positive mass.
pub fn row_normalize(kernel: &SparseAffinity) -> Result<DiffusionOperator> {
    let k = kernel.matrix();
    let mut degrees = Vec::with_capacity(k.nrows());
    for i in 0..k.nrows() {
        let (_, vals) = k.row(i);
        let q: f64 = vals.iter().sum();
        if !(q > 0.0) {
            return Err(Error::ZeroRow { pixel: i });
        }
        degrees.push(q);
    }
    Ok(DiffusionOperator { kernel: kernel.clone(), degrees })
}

/// `A(i, j) = K(i, j) / √(q(i) q(j))`, symmetric by construction.
pub fn conjugate_symmetric(op: &DiffusionOperator) -> CsrMatrix {
    let q = &op.degrees;
    op.kernel.matrix().map_values(|i, j, v| v / libm::sqrt(q[i] * q[j]))
}

/// Leading eigenpairs of the diffusion operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Descending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors of `A`.
    pub phi: Vec<Vec<f64>>,
    /// Eigenvectors of `P`, `ψ_j = Q^{-1/2} φ_j`.
    pub psi: Vec<Vec<f64>>,
    /// `‖A φ_j − λ_j φ_j‖₂`
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Number of nontrivial eigenpairs; `count + 1` pairs are computed.
    pub count: usize,
    pub tol: f64,
    pub max_matvecs: usize,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { count: 4, tol: 1e-8, max_matvecs: 20_000, seed: 0 }
    }
}

/// The `k + 1` algebraically largest eigenpairs of `A`, descending, each
/// vector with its first nonzero entry positive.
pub fn eigensolve_topk(a: &CsrMatrix, k: usize, tol: f64, seed: u64) -> Result<(Vec<f64>, Vec<Vec<f64>>, Vec<f64>)> {
    let opts = EigenOptions { count: k, tol, seed, ..Default::default() };
    eigensolve_with(a, &opts)
}

fn eigensolve_with(a: &CsrMatrix, opts: &EigenOptions) -> Result<(Vec<f64>, Vec<Vec<f64>>, Vec<f64>)> {
    if a.nrows() != a.ncols() {
        return Err(Error::Mismatch { what: "operator columns", expected: a.nrows(), actual: a.ncols() });
    }
    let want = opts.count + 1;
    if want > a.nrows() {
        return Err(Error::InvalidParameter(alloc::format!(
            "{} eigenpairs requested from a {}-pixel operator",
            want,
            a.nrows()
        )));
    }
    let kopts = KrylovOptions { tol: opts.tol, max_matvecs: opts.max_matvecs, basis_size: 0, seed: opts.seed };
    let pairs = largest_eigenpairs(a, want, &kopts)?;
    Ok((pairs.values, pairs.vectors, pairs.residuals))
}

/// `ψ_j(i) = φ_j(i) / √q(i)`
pub fn recover_diffusion_eigenvectors(op: &DiffusionOperator, phi: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let inv_sqrt: Vec<f64> = op.degrees.iter().map(|&q| 1.0 / libm::sqrt(q)).collect();
    phi.iter().map(|p| p.iter().zip(&inv_sqrt).map(|(a, b)| a * b).collect()).collect()
}

/// `A` restricted to the complement of the known top eigenvector `u`, with
/// `u` itself sent to `-2` so it never competes with the wanted pairs.
struct Deflated<'a> {
    a: &'a CsrMatrix,
    u: &'a [f64],
}

impl SymmetricOperator for Deflated<'_> {
    fn dim(&self) -> usize {
        self.u.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let c = dot(self.u, x);
        let mut p = x.to_vec();
        axpy(-c, self.u, &mut p);
        self.a.mul_vec(&p, y);
        let d = dot(self.u, y);
        axpy(-d - 2.0 * c, self.u, y);
    }
}

/// Normalize, conjugate, eigensolve and map back.
///
/// `φ₀ = √q / ‖√q‖` satisfies `A φ₀ = φ₀` exactly, so it is taken in closed
/// form and the Krylov solve runs on its orthogonal complement. This keeps
/// `ψ₀` constant even when `1 − λ₁` is tiny (nearly disconnected slices).
pub fn diffusion_spectrum(kernel: &SparseAffinity, opts: &EigenOptions) -> Result<(DiffusionOperator, Spectrum)> {
    let op = row_normalize(kernel)?;
    let a = conjugate_symmetric(&op);
    let n = a.nrows();
    if opts.count + 1 > n {
        return Err(Error::InvalidParameter(alloc::format!(
            "{} eigenpairs requested from a {}-pixel operator",
            opts.count + 1,
            n
        )));
    }
    let mut u: Vec<f64> = op.degrees.iter().map(|&q| libm::sqrt(q)).collect();
    let nu = norm2(&u);
    u.iter_mut().for_each(|x| *x /= nu);
    let mut au = vec![0.0; n];
    a.mul_vec(&u, &mut au);
    axpy(-1.0, &u, &mut au);
    let mut values = vec![1.0];
    let mut residuals = vec![norm2(&au)];
    let mut phi = vec![u];
    if opts.count > 0 {
        let kopts = KrylovOptions { tol: opts.tol, max_matvecs: opts.max_matvecs, basis_size: 0, seed: opts.seed };
        let pairs = largest_eigenpairs(&Deflated { a: &a, u: &phi[0] }, opts.count, &kopts)?;
        values.extend(pairs.values);
        residuals.extend(pairs.residuals);
        phi.extend(pairs.vectors);
    }
    let psi = recover_diffusion_eigenvectors(&op, &phi);
    Ok((op, Spectrum { values, phi, psi, residuals }))
}

/// `‖P ψ − λ ψ‖_∞`
pub fn markov_residual(op: &DiffusionOperator, psi: &[f64], lambda: f64) -> f64 {
    let mut y = vec![0.0; psi.len()];
    op.apply_markov(psi, &mut y);
    y.iter().zip(psi).map(|(a, b)| (a - lambda * b).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dot, norm2};
    use alloc::vec;

    fn affinity(rows: Vec<Vec<(usize, f64)>>) -> SparseAffinity {
        let n = rows.len();
        SparseAffinity::from_symmetric(CsrMatrix::from_rows(n, rows).unwrap()).unwrap()
    }

    fn two_pixel(w: f64) -> SparseAffinity {
        affinity(vec![vec![(0, 1.0), (1, w)], vec![(0, w), (1, 1.0)]])
    }

    /// Path of `n` pixels with seeded weights.
    fn path(n: usize, seed: u64) -> SparseAffinity {
        let mut rng = crate::rng::SplitMix64::new(seed);
        let w: Vec<f64> = (0..n - 1).map(|_| 0.1 + 0.9 * rng.next_f64()).collect();
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![(i, 1.0)];
                if i > 0 {
                    r.push((i - 1, w[i - 1]));
                }
                if i + 1 < n {
                    r.push((i + 1, w[i]));
                }
                r
            })
            .collect();
        affinity(rows)
    }

    #[test]
    fn identity_kernel() {
        let k = affinity(vec![vec![(0, 1.0)], vec![(1, 1.0)], vec![(2, 1.0)]]);
        let op = row_normalize(&k).unwrap();
        assert_eq!(op.degrees(), &[1.0, 1.0, 1.0]);
        let a = conjugate_symmetric(&op);
        assert_eq!(a.to_dense(), vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let (vals, _, _) = eigensolve_topk(&a, 2, 1e-8, 0).unwrap();
        assert!(vals.iter().all(|v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn two_pixel_closed_form() {
        let w = 0.25;
        let op = row_normalize(&two_pixel(w)).unwrap();
        assert_eq!(op.degrees(), &[1.0 + w, 1.0 + w]);
        let a = conjugate_symmetric(&op);
        let s = 1.0 / (1.0 + w);
        for (got, want) in a.to_dense().iter().zip([s, w * s, w * s, s]) {
            assert!((got - want).abs() < 1e-15);
        }
        let (vals, vecs, _) = eigensolve_topk(&a, 1, 1e-10, 3).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-14);
        assert!((vals[1] - (1.0 - w) / (1.0 + w)).abs() < 1e-14);
        let r = core::f64::consts::FRAC_1_SQRT_2;
        assert!((vecs[0][0] - r).abs() < 1e-12 && (vecs[0][1] - r).abs() < 1e-12);
        assert!((vecs[1][0] - r).abs() < 1e-12 && (vecs[1][1] + r).abs() < 1e-12);
    }

    #[test]
    fn diagonal_kernel_conjugates_to_identity() {
        let k = affinity(vec![vec![(0, 1.0)], vec![(1, 1.0)]]);
        let a = conjugate_symmetric(&row_normalize(&k).unwrap());
        assert_eq!(a.to_dense(), vec![1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn zero_row_is_reported() {
        let k = affinity(vec![vec![(0, 1.0)], vec![]]);
        assert_eq!(row_normalize(&k).unwrap_err(), Error::ZeroRow { pixel: 1 });
    }

    #[test]
    fn path_graph_matches_dense_oracle() {
        let k = path(5, 17);
        let op = row_normalize(&k).unwrap();
        let a = conjugate_symmetric(&op);
        let (vals, vecs, res) = eigensolve_topk(&a, 4, 1e-12, 17).unwrap();
        let oracle = nalgebra::DMatrix::from_row_slice(5, 5, &a.to_dense()).symmetric_eigen();
        let mut expected: Vec<f64> = oracle.eigenvalues.iter().copied().collect();
        expected.sort_by(|a, b| b.total_cmp(a));
        for (v, e) in vals.iter().zip(&expected) {
            assert!((v - e).abs() < 1e-10);
        }
        assert!(res.iter().all(|&r| r <= 1e-12));
        for i in 0..5 {
            for j in 0..5 {
                let d = dot(&vecs[i], &vecs[j]);
                assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn recovered_vectors_are_markov_eigenvectors() {
        let k = path(60, 2);
        let (op, spec) = diffusion_spectrum(&k, &EigenOptions { count: 3, tol: 1e-10, ..Default::default() }).unwrap();
        assert!((spec.values[0] - 1.0).abs() < 1e-10);
        let psi0 = &spec.psi[0];
        let (lo, hi) = psi0.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
        assert!((hi - lo) / hi.abs() <= 1e-8);
        for (lambda, psi) in spec.values.iter().zip(&spec.psi) {
            assert!(markov_residual(&op, psi, *lambda) <= 1e-7);
        }
        for s in op.markov_row_sums() {
            assert!((s - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn constant_degree_keeps_direction() {
        // Cycle with equal weights: q constant, so psi is proportional to phi.
        let n = 8;
        let rows = (0..n).map(|i| vec![(i, 1.0), ((i + 1) % n, 0.5), ((i + n - 1) % n, 0.5)]).collect();
        let k = affinity(rows);
        let (_, spec) = diffusion_spectrum(&k, &EigenOptions { count: 2, tol: 1e-10, ..Default::default() }).unwrap();
        for (phi, psi) in spec.phi.iter().zip(&spec.psi) {
            let ratio = psi[0] / phi[0];
            for (a, b) in phi.iter().zip(psi) {
                assert!((b - ratio * a).abs() < 1e-14);
            }
            assert!((norm2(phi) - 1.0).abs() < 1e-12);
        }
    }
}
