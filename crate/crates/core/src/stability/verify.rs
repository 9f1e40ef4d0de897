use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::deformation::{jacobian_extremes, Deformation, DeformationFamily};
use super::fem::{assemble_pulled_back_operator, assemble_reference_operator};
use super::neumann::neumann_eigensolve;
use super::rectangle::RectangleSpec;
use super::theorem::{
    expansion_coefficients, lemma_checks, residual_tail, theorem_bound, LemmaChecks, LemmaInputs, HYPOTHESIS_LIMIT,
};
use crate::{Error, Result};

/// Multiplier on the two-grid discretization estimate in the pass test.
const ALLOWANCE_FACTOR: f64 = 10.0;
/// Minimum relative gap `(η_{k+1} − η_k) / η₁` for an admissible `k`.
const MIN_GAP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub rect: RectangleSpec,
    pub catalog: Vec<Deformation>,
    pub ks: Vec<usize>,
    /// Spatial dimension entering the bound.
    pub d: usize,
    /// Jacobian samples per axis.
    pub samples: usize,
    /// Eigensolver residual tolerance.
    pub tol: f64,
    /// Slack allowed in each eigenvalue inequality.
    pub lemma_slack: f64,
    pub seed: u64,
}

impl VerifyConfig {
    pub fn new(rect: RectangleSpec, catalog: Vec<Deformation>, ks: Vec<usize>) -> Self {
        Self { rect, catalog, ks, d: 2, samples: 64, tol: 1e-8, lemma_slack: 1e-8, seed: 0 }
    }
}

/// Quantities measured for one deformation and one `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub mu1: f64,
    /// Coefficients of the deformed eigenvector in the reference basis.
    pub alpha: Vec<f64>,
    /// `‖u₁∘φ‖²` in the reference inner product.
    pub norm_sq: f64,
    pub residual: f64,
    pub bound: f64,
    /// Discretization allowance added to the bound.
    pub allowance: f64,
    pub pass: bool,
    pub lemmas: LemmaChecks,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionReport {
    pub family: DeformationFamily,
    pub amplitude: f64,
    pub eps_meas: f64,
    pub delta_meas: f64,
    pub d: usize,
    pub k: usize,
    pub eta1: f64,
    pub eta_k1: f64,
    /// `None` when the deformation lies outside the bound's hypothesis.
    pub evaluation: Option<Evaluation>,
    pub skip_reason: Option<String>,
}

impl ProjectionReport {
    pub fn is_skipped(&self) -> bool {
        self.evaluation.is_none()
    }

    /// Theorem and all three inequalities hold. Skipped rows count as passing.
    pub fn all_pass(&self) -> bool {
        self.evaluation.as_ref().is_none_or(|e| e.pass && e.lemmas.all_pass())
    }
}

/// Relative change of the first nonzero reference eigenvalue between the
/// grid of `rect` and the grid with half as many cells per axis.
pub fn two_grid_eta1_error(rect: &RectangleSpec, tol: f64, seed: u64) -> Result<f64> {
    if rect.nx < 4 || rect.ny < 4 {
        return Err(Error::InvalidParameter(format!("grid {} × {} is too coarse to halve", rect.nx, rect.ny)));
    }
    let fine = neumann_eigensolve(&assemble_reference_operator(rect)?, 1, tol, seed)?.values[1];
    let coarse_rect = rect.with_grid(rect.nx / 2, rect.ny / 2);
    let coarse = neumann_eigensolve(&assemble_reference_operator(&coarse_rect)?, 1, tol, seed)?.values[1];
    Ok((fine - coarse).abs() / fine)
}

/// Measure the projection residual of the first deformed eigenfunction onto
/// the leading reference eigenfunctions for every deformation and `k`.
pub fn verify_theorem(cfg: &VerifyConfig) -> Result<Vec<ProjectionReport>> {
    cfg.rect.validate()?;
    let kmax = *cfg.ks.iter().max().ok_or_else(|| Error::InvalidParameter("empty k list".into()))?;
    if cfg.ks.contains(&0) {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let reference_op = assemble_reference_operator(&cfg.rect)?;
    let reference = neumann_eigensolve(&reference_op, kmax + 1, cfg.tol, cfg.seed)?;
    let eta = &reference.values;
    for &k in &cfg.ks {
        if eta[k + 1] - eta[k] < MIN_GAP * eta[1] {
            return Err(Error::InvalidParameter(format!(
                "k = {k} splits a degenerate eigenvalue ({} vs {})",
                eta[k], eta[k + 1]
            )));
        }
    }
    let allowance = ALLOWANCE_FACTOR * two_grid_eta1_error(&cfg.rect, cfg.tol, cfg.seed)?;

    let mut reports = Vec::with_capacity(cfg.catalog.len() * cfg.ks.len());
    for def in &cfg.catalog {
        let ext = jacobian_extremes(def, &cfg.rect, cfg.samples)?;
        let ed = ext.eps * cfg.d as f64;
        let row = |k: usize, evaluation: Option<Evaluation>, skip_reason: Option<String>| ProjectionReport {
            family: def.family,
            amplitude: def.amplitude,
            eps_meas: ext.eps,
            delta_meas: ext.delta,
            d: cfg.d,
            k,
            eta1: eta[1],
            eta_k1: eta[k + 1],
            evaluation,
            skip_reason,
        };
        if ed > HYPOTHESIS_LIMIT {
            let reason = format!("ε d = {ed:.4} exceeds {HYPOTHESIS_LIMIT}");
            reports.extend(cfg.ks.iter().map(|&k| row(k, None, Some(reason.clone()))));
            continue;
        }
        let deformed_op = assemble_pulled_back_operator(&cfg.rect, def)?;
        let deformed = neumann_eigensolve(&deformed_op, 1, cfg.tol, cfg.seed)?;
        let (mu1, u) = (deformed.values[1], &deformed.vectors[1]);
        let alpha = expansion_coefficients(u, &reference, &reference_op.mass)?;
        let norm_sq: f64 = u.iter().zip(&reference_op.mass).map(|(x, m)| x * x * m).sum();
        let mut su = alloc::vec![0.0; u.len()];
        reference_op.stiffness.mul_vec(u, &mut su);
        let dirichlet_energy: f64 = u.iter().zip(&su).map(|(a, b)| a * b).sum();
        let lemmas = lemma_checks(
            &LemmaInputs { eta1: eta[1], mu1, dirichlet_energy, alpha0: alpha[0], eps: ext.eps, delta: ext.delta },
            cfg.lemma_slack,
        )?;
        for &k in &cfg.ks {
            let residual = residual_tail(&alpha, k, norm_sq);
            let bound = theorem_bound(eta[1], eta[k + 1], ext.eps, cfg.d)?;
            let evaluation = Evaluation {
                mu1,
                alpha: alpha.clone(),
                norm_sq,
                residual,
                bound,
                allowance,
                pass: residual <= bound + allowance,
                lemmas,
            };
            reports.push(row(k, Some(evaluation), None));
        }
    }
    Ok(reports)
}
