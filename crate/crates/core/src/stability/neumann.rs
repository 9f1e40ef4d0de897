use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::fem::FemOperator;
use crate::krylov::{largest_eigenpairs, KrylovOptions};
use crate::linalg::{dot, fix_sign, norm2, BandedCholesky, CsrMatrix, SymmetricOperator};
use crate::{Error, Result};

/// Smallest eigenpairs of `S v = η M v`, ascending, with `M`-orthonormal
/// eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct NeumannSpectrum {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    /// `‖S v − η M v‖₂ / ‖M v‖₂`
    pub residuals: Vec<f64>,
}

/// `M^{1/2} (S + σ M)^{-1} M^{1/2}`
struct ShiftInvert {
    factor: BandedCholesky,
    sqrt_mass: Vec<f64>,
}

impl SymmetricOperator for ShiftInvert {
    fn dim(&self) -> usize {
        self.sqrt_mass.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for ((yi, xi), s) in y.iter_mut().zip(x).zip(&self.sqrt_mass) {
            *yi = xi * s;
        }
        self.factor.solve_in_place(y);
        for (yi, s) in y.iter_mut().zip(&self.sqrt_mass) {
            *yi *= s;
        }
    }
}

fn relative_residual(s: &CsrMatrix, mass: &[f64], v: &[f64], eta: f64) -> f64 {
    let mut sv = vec![0.0; v.len()];
    s.mul_vec(v, &mut sv);
    let mv: Vec<f64> = v.iter().zip(mass).map(|(x, m)| x * m).collect();
    let r: Vec<f64> = sv.iter().zip(&mv).map(|(a, b)| a - eta * b).collect();
    norm2(&r) / norm2(&mv)
}

/// The `count + 1` smallest eigenpairs (the first being the constant mode)
/// by shift-and-invert Lanczos.
///
/// Every returned pair satisfies `‖S v − η M v‖₂ ≤ tol ‖M v‖₂`.
pub fn neumann_eigensolve(op: &FemOperator, count: usize, tol: f64, seed: u64) -> Result<NeumannSpectrum> {
    let n = op.dim();
    if count == 0 || count + 1 > n {
        return Err(Error::InvalidParameter(format!("cannot compute {count} nontrivial pairs of a {n}-node grid")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    if op.stiffness.nrows() != n || op.mass.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::InvalidParameter("mass must be positive and match the stiffness".into()));
    }
    // A shift of the order of the first nonzero eigenvalue keeps the wanted
    // part of the spectrum well separated after inversion.
    let longest = op.rect.width.max(op.rect.height);
    let sigma = PI * PI / (longest * longest);
    let shifted = op.stiffness.map_values(|i, j, v| if i == j { v + sigma * op.mass[i] } else { v });
    let factor = BandedCholesky::factor(&shifted, op.bandwidth())?;
    let inv = ShiftInvert { factor, sqrt_mass: op.mass.iter().map(|&m| libm::sqrt(m)).collect() };

    let mut krylov_tol = 1e-3 * tol / sigma;
    let mut last_worst = f64::INFINITY;
    for _ in 0..4 {
        let opts = KrylovOptions { tol: krylov_tol, max_matvecs: 50 * n.max(100), basis_size: 0, seed };
        let pairs = largest_eigenpairs(&inv, count + 1, &opts)?;
        let mut values = Vec::with_capacity(count + 1);
        let mut vectors = Vec::with_capacity(count + 1);
        let mut residuals = Vec::with_capacity(count + 1);
        for y in &pairs.vectors {
            let mut v: Vec<f64> = y.iter().zip(&inv.sqrt_mass).map(|(a, s)| a / s).collect();
            let mut sv = vec![0.0; n];
            op.stiffness.mul_vec(&v, &mut sv);
            let mv_norm = libm::sqrt(v.iter().zip(&op.mass).map(|(x, m)| x * x * m).sum::<f64>());
            v.iter_mut().for_each(|x| *x /= mv_norm);
            fix_sign(&mut v);
            let eta = dot(&v, &sv) / (mv_norm * mv_norm);
            residuals.push(relative_residual(&op.stiffness, &op.mass, &v, eta));
            values.push(eta.max(0.0));
            vectors.push(v);
        }
        last_worst = residuals.iter().fold(0.0f64, |a, &b| a.max(b));
        if last_worst <= tol {
            return Ok(NeumannSpectrum { values, vectors, residuals });
        }
        krylov_tol *= 1e-2;
    }
    Err(Error::NoConvergence { iterations: 4, worst_residual: last_worst })
}
