use alloc::format;
use alloc::vec::Vec;

use super::neumann::NeumannSpectrum;
use crate::{Error, Result};

/// Largest admissible `ε d` for the projection bound.
pub const HYPOTHESIS_LIMIT: f64 = 0.1;

/// `α_j = uᵀ M v_j` for every basis vector.
pub fn expansion_coefficients(u: &[f64], basis: &NeumannSpectrum, mass: &[f64]) -> Result<Vec<f64>> {
    if mass.len() != u.len() {
        return Err(Error::Mismatch { what: "mass", expected: u.len(), actual: mass.len() });
    }
    let weighted: Vec<f64> = u.iter().zip(mass).map(|(a, m)| a * m).collect();
    basis
        .vectors
        .iter()
        .map(|v| {
            if v.len() != u.len() {
                return Err(Error::Mismatch { what: "basis vector", expected: u.len(), actual: v.len() });
            }
            Ok(v.iter().zip(&weighted).map(|(a, b)| a * b).sum())
        })
        .collect()
}

/// Energy outside `span{v_1, …, v_k}`: `norm_sq − Σ_{j=1..k} α_j²`, which
/// equals `α₀² + Σ_{j>k} α_j²`. Coefficients beyond `alpha.len()` count as
/// zero; small negative results from rounding are clamped to zero.
pub fn residual_tail(alpha: &[f64], k: usize, norm_sq: f64) -> f64 {
    let captured: f64 = alpha.iter().skip(1).take(k).map(|a| a * a).sum();
    (norm_sq - captured).max(0.0)
}

fn check_hypothesis(eta1: f64, eta_k1: f64, eps: f64, d: usize) -> Result<f64> {
    let ed = eps * d as f64;
    if !(eps >= 0.0) || !ed.is_finite() {
        return Err(Error::InvalidParameter(format!("deviation {eps} must be non-negative")));
    }
    if ed > HYPOTHESIS_LIMIT {
        return Err(Error::OutOfHypothesis(format!("ε d = {ed} exceeds {HYPOTHESIS_LIMIT}")));
    }
    if !(eta1 > 0.0 && eta_k1 > eta1) {
        return Err(Error::InvalidParameter(format!("need 0 < η₁ < η_(k+1), got {eta1} and {eta_k1}")));
    }
    Ok(ed)
}

/// `20 η₁ ε d / (η_{k+1} − η₁) + ε d`, bounding the energy outside
/// `span{v_1, …, v_k}`.
pub fn theorem_bound(eta1: f64, eta_k1: f64, eps: f64, d: usize) -> Result<f64> {
    let ed = check_hypothesis(eta1, eta_k1, eps, d)?;
    Ok(20.0 * eta1 * ed / (eta_k1 - eta1) + ed)
}

/// `20 η₁ ε d / (η_{k+1} − η₁)`, bounding the energy outside
/// `span{v_0, v_1, …, v_k}` (constants included).
pub fn theorem_bound_with_constant(eta1: f64, eta_k1: f64, eps: f64, d: usize) -> Result<f64> {
    let ed = check_hypothesis(eta1, eta_k1, eps, d)?;
    Ok(20.0 * eta1 * ed / (eta_k1 - eta1))
}

/// Measured quantities entering the three eigenvalue inequalities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaInputs {
    /// First nonzero reference eigenvalue.
    pub eta1: f64,
    /// First nonzero deformed eigenvalue.
    pub mu1: f64,
    /// `Σ_j η_j α_j²` over the complete reference basis, i.e. `uᵀ S u`.
    pub dirichlet_energy: f64,
    pub alpha0: f64,
    pub eps: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaChecks {
    /// `η₁ (1+ε)² (1−δ) / ((1−δ)³ − (1+δ) δ²) ≥ μ₁`
    pub lemma1: LemmaCheck,
    /// `μ₁ (1+δ) / (1−ε)² ≥ Σ η_j α_j²`
    pub lemma2: LemmaCheck,
    /// `α₀² ≤ δ² (1+δ)² / (1−δ)²`
    pub lemma3: LemmaCheck,
}

impl LemmaChecks {
    pub fn all_pass(&self) -> bool {
        self.lemma1.pass && self.lemma2.pass && self.lemma3.pass
    }
}

/// Evaluate the three inequalities, each allowed to miss by `slack`.
pub fn lemma_checks(inputs: &LemmaInputs, slack: f64) -> Result<LemmaChecks> {
    let LemmaInputs { eta1, mu1, dirichlet_energy, alpha0, eps, delta } = *inputs;
    if !(0.0..1.0).contains(&eps) || !(0.0..1.0).contains(&delta) {
        return Err(Error::OutOfHypothesis(format!("deviations ε = {eps}, δ = {delta} must lie in [0, 1)")));
    }
    let den = (1.0 - delta) * (1.0 - delta) * (1.0 - delta) - (1.0 + delta) * delta * delta;
    if !(den > 0.0) {
        return Err(Error::OutOfHypothesis(format!("δ = {delta} makes the eigenvalue upper bound vacuous")));
    }
    let at_least = |lhs: f64, rhs: f64| LemmaCheck { lhs, rhs, pass: lhs + slack >= rhs };
    let lemma1 = at_least(eta1 * (1.0 + eps) * (1.0 + eps) * (1.0 - delta) / den, mu1);
    let lemma2 = at_least(mu1 * (1.0 + delta) / ((1.0 - eps) * (1.0 - eps)), dirichlet_energy);
    let ratio = delta * (1.0 + delta) / (1.0 - delta);
    let a0 = alpha0 * alpha0;
    let rhs3 = ratio * ratio;
    let lemma3 = LemmaCheck { lhs: a0, rhs: rhs3, pass: a0 <= rhs3 + slack };
    Ok(LemmaChecks { lemma1, lemma2, lemma3 })
}
