//! Thick-restart Lanczos for the algebraically largest eigenpairs of a
//! symmetric operator.
//!
//! The basis is kept fully reorthogonalized (classical Gram–Schmidt applied
//! twice) and the projected matrix `Vᵀ A V` is formed explicitly, so the
//! Rayleigh–Ritz step never relies on the three-term recurrence holding in
//! floating point. On restart the leading Ritz vectors are kept and the
//! Krylov space is continued from a Ritz residual. Exact multiplicities are
//! handled by injecting fresh seeded random directions on breakdown.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{axpy, dot, fix_sign, norm2, scale, symmetric_eigen, SymmetricOperator};
use crate::rng::SplitMix64;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovOptions {
    /// Absolute residual tolerance `‖A x − θ x‖₂` for unit Ritz vectors.
    pub tol: f64,
    /// Cap on operator applications.
    pub max_matvecs: usize,
    /// Maximum basis size; `0` picks `max(2·count + 20, 40)`.
    pub basis_size: usize,
    pub seed: u64,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_matvecs: 20_000, basis_size: 0, seed: 0 }
    }
}

/// Eigenpairs in descending eigenvalue order.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub matvecs: usize,
}

fn random_unit(n: usize, rng: &mut SplitMix64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.next_normal()).collect();
    let nv = norm2(&v);
    scale(1.0 / nv, &mut v);
    v
}

/// Orthogonalize `v` against `basis` twice and normalize it. Returns `false`
/// when `v` lies (numerically) inside the span of `basis`.
fn orthonormalize(basis: &[Vec<f64>], v: &mut [f64]) -> bool {
    let original = norm2(v);
    if original == 0.0 || !original.is_finite() {
        return false;
    }
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, v);
            axpy(-c, b, v);
        }
    }
    let nv = norm2(v);
    if nv <= 1e-10 * original {
        return false;
    }
    scale(1.0 / nv, v);
    true
}

/// Compute the `count` algebraically largest eigenpairs of `op`.
pub fn largest_eigenpairs<A>(op: &A, count: usize, opts: &KrylovOptions) -> Result<EigenPairs>
where
    A: SymmetricOperator + ?Sized,
{
    let n = op.dim();
    if count == 0 || count > n {
        return Err(Error::InvalidParameter(alloc::format!(
            "requested {count} eigenpairs of a {n}-dimensional operator"
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("tolerance {} must be positive", opts.tol)));
    }
    let max_basis = if opts.basis_size > 0 { opts.basis_size } else { (2 * count + 20).max(40) };
    let m = max_basis.max(count + 1).min(n);
    let keep = ((count + m) / 2).max(count).min(m.saturating_sub(1)).max(1);

    let mut rng = SplitMix64::new(opts.seed);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut images: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut candidate = random_unit(n, &mut rng);
    let mut matvecs = 0usize;
    let mut worst;

    loop {
        while basis.len() < m {
            let mut ok = orthonormalize(&basis, &mut candidate);
            let mut tries = 0;
            while !ok && tries < 8 {
                candidate = random_unit(n, &mut rng);
                ok = orthonormalize(&basis, &mut candidate);
                tries += 1;
            }
            if !ok {
                break;
            }
            let mut image = vec![0.0; n];
            op.apply(&candidate, &mut image);
            matvecs += 1;
            basis.push(core::mem::take(&mut candidate));
            candidate = image.clone();
            images.push(image);
        }

        let size = basis.len();
        let mut h = vec![0.0; size * size];
        for i in 0..size {
            for j in i..size {
                let v = 0.5 * (dot(&basis[i], &images[j]) + dot(&basis[j], &images[i]));
                h[i * size + j] = v;
                h[j * size + i] = v;
            }
        }
        let (theta, y) = symmetric_eigen(&h, size);

        let nritz = keep.max(count).min(size);
        let mut ritz = Vec::with_capacity(nritz);
        let mut ritz_images = Vec::with_capacity(nritz);
        let mut residuals = Vec::with_capacity(nritz);
        let mut residual_vecs = Vec::with_capacity(count);
        for k in 0..nritz {
            let mut x = vec![0.0; n];
            let mut ax = vec![0.0; n];
            for i in 0..size {
                let c = y[i * size + k];
                axpy(c, &basis[i], &mut x);
                axpy(c, &images[i], &mut ax);
            }
            let mut r = ax.clone();
            axpy(-theta[k], &x, &mut r);
            residuals.push(norm2(&r));
            if k < count {
                residual_vecs.push(r);
            }
            ritz.push(x);
            ritz_images.push(ax);
        }

        worst = residuals[..count].iter().fold(0.0f64, |a, &b| a.max(b));
        let converged = size >= count && worst <= opts.tol;
        if converged || size == n {
            if !converged {
                return Err(Error::NoConvergence { iterations: matvecs, worst_residual: worst });
            }
            let mut vectors: Vec<Vec<f64>> = ritz.into_iter().take(count).collect();
            for v in vectors.iter_mut() {
                fix_sign(v);
            }
            return Ok(EigenPairs {
                values: theta[..count].to_vec(),
                vectors,
                residuals: residuals[..count].to_vec(),
                matvecs,
            });
        }
        if matvecs >= opts.max_matvecs {
            break;
        }

        // Thick restart: continue from the residual of the least converged
        // wanted pair; all Ritz residuals of a Krylov space are parallel.
        let (worst_k, _) = residuals[..count]
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (k, &r)| if r > acc.1 { (k, r) } else { acc });
        candidate = residual_vecs.swap_remove(worst_k);
        ritz.truncate(keep);
        ritz_images.truncate(keep);
        basis = ritz;
        images = ritz_images;
    }
    Err(Error::NoConvergence { iterations: matvecs, worst_residual: worst })
}
