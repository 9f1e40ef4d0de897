//! Numerical laboratory for the stability of Neumann Laplacian
//! eigenfunctions on rectangles under small diffeomorphic deformations.
//!
//! Deformed problems are never meshed: the Dirichlet form of the deformed
//! domain is pulled back to the reference rectangle through the metric
//! `G = |det J| J⁻¹ J⁻ᵀ` and density `ρ = |det J|`, so the discrete
//! eigenvectors are directly the deformed eigenfunctions composed with the
//! deformation, sampled on the reference grid.

mod deformation;
mod fem;
mod neumann;
mod rectangle;
mod theorem;
mod verify;

pub use deformation::{
    amplitude_for_target, jacobian_extremes, singular_values, Deformation, DeformationFamily, JacobianExtremes,
};
pub use fem::{assemble_pulled_back_operator, assemble_reference_operator, quadrature_extremes, FemOperator};
pub use neumann::{neumann_eigensolve, NeumannSpectrum};
pub use rectangle::{analytic_rectangle_spectrum, RectangleMode, RectangleSpec};
pub use theorem::{
    expansion_coefficients, lemma_checks, residual_tail, theorem_bound, theorem_bound_with_constant, LemmaCheck,
    LemmaChecks, LemmaInputs, HYPOTHESIS_LIMIT,
};
pub use verify::{two_grid_eta1_error, verify_theorem, Evaluation, ProjectionReport, VerifyConfig};
