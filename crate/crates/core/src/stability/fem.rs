use alloc::vec;
use alloc::vec::Vec;

use super::deformation::{det, Deformation, JacobianExtremes};
use super::rectangle::RectangleSpec;
use crate::linalg::CsrMatrix;
use crate::{Error, Result};

/// Stiffness matrix and lumped (diagonal) mass of a bilinear finite element
/// discretization with natural boundary conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct FemOperator {
    pub rect: RectangleSpec,
    pub stiffness: CsrMatrix,
    pub mass: Vec<f64>,
}

impl FemOperator {
    pub fn dim(&self) -> usize {
        self.mass.len()
    }

    /// Half-bandwidth of the stiffness matrix under x-fastest numbering.
    pub fn bandwidth(&self) -> usize {
        self.rect.nx + 2
    }
}

const GAUSS: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];
/// Local node offsets, x fastest.
const LOCAL: [(usize, usize); 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];

/// Calls `f(x, y, ξ, η)` at every Gauss point of the element `(ex, ey)`.
fn for_each_gauss_point(rect: &RectangleSpec, ex: usize, ey: usize, mut f: impl FnMut(f64, f64, f64, f64) -> Result<()>) -> Result<()> {
    let hx = rect.width / rect.nx as f64;
    let hy = rect.height / rect.ny as f64;
    for &eta in &GAUSS {
        for &xi in &GAUSS {
            let x = (ex as f64 + 0.5 * (1.0 + xi)) * hx;
            let y = (ey as f64 + 0.5 * (1.0 + eta)) * hy;
            f(x, y, xi, eta)?;
        }
    }
    Ok(())
}

fn assemble(rect: &RectangleSpec, metric: impl Fn(f64, f64) -> Result<([[f64; 2]; 2], f64)>) -> Result<FemOperator> {
    rect.validate()?;
    let hx = rect.width / rect.nx as f64;
    let hy = rect.height / rect.ny as f64;
    let jac = 0.25 * hx * hy;
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::with_capacity(16); rect.node_count()];
    let mut mass = vec![0.0; rect.node_count()];
    for ey in 0..rect.ny {
        for ex in 0..rect.nx {
            let mut ke = [[0.0; 4]; 4];
            let mut me = [0.0; 4];
            for_each_gauss_point(rect, ex, ey, |x, y, xi, eta| {
                let (g, rho) = metric(x, y)?;
                let mut grad = [[0.0; 2]; 4];
                let mut shape = [0.0; 4];
                for (a, &(ix, iy)) in LOCAL.iter().enumerate() {
                    let (sx, sy) = (2.0 * ix as f64 - 1.0, 2.0 * iy as f64 - 1.0);
                    shape[a] = 0.25 * (1.0 + sx * xi) * (1.0 + sy * eta);
                    grad[a] = [0.25 * sx * (1.0 + sy * eta) * 2.0 / hx, 0.25 * sy * (1.0 + sx * xi) * 2.0 / hy];
                }
                for a in 0..4 {
                    let ga = [g[0][0] * grad[a][0] + g[0][1] * grad[a][1], g[1][0] * grad[a][0] + g[1][1] * grad[a][1]];
                    for b in a..4 {
                        ke[a][b] += (ga[0] * grad[b][0] + ga[1] * grad[b][1]) * jac;
                    }
                    me[a] += rho * shape[a] * jac;
                }
                Ok(())
            })?;
            let nodes = LOCAL.map(|(ix, iy)| rect.node(ex + ix, ey + iy));
            for a in 0..4 {
                for b in 0..4 {
                    let v = if a <= b { ke[a][b] } else { ke[b][a] };
                    rows[nodes[a]].push((nodes[b], v));
                }
                mass[nodes[a]] += me[a];
            }
        }
    }
    let stiffness = CsrMatrix::from_rows(rect.node_count(), rows)?;
    Ok(FemOperator { rect: *rect, stiffness, mass })
}

/// Discrete Neumann Laplacian of the reference rectangle.
pub fn assemble_reference_operator(rect: &RectangleSpec) -> Result<FemOperator> {
    assemble(rect, |_, _| Ok(([[1.0, 0.0], [0.0, 1.0]], 1.0)))
}

/// Dirichlet form of the deformed domain pulled back to the rectangle:
/// metric `G = |det J| J⁻¹ J⁻ᵀ` and mass density `ρ = |det J|`.
pub fn assemble_pulled_back_operator(rect: &RectangleSpec, def: &Deformation) -> Result<FemOperator> {
    assemble(rect, |x, y| {
        let j = def.jacobian(rect, x, y);
        let d = det(&j);
        if !(d > 0.0) {
            return Err(Error::InvalidDeformation { x, y, det: d });
        }
        // J⁻¹ = adj / det, so |det| J⁻¹ J⁻ᵀ = adj adjᵀ / det.
        let adj = [[j[1][1], -j[0][1]], [-j[1][0], j[0][0]]];
        let g01 = (adj[0][0] * adj[1][0] + adj[0][1] * adj[1][1]) / d;
        let g = [
            [(adj[0][0] * adj[0][0] + adj[0][1] * adj[0][1]) / d, g01],
            [g01, (adj[1][0] * adj[1][0] + adj[1][1] * adj[1][1]) / d],
        ];
        Ok((g, d))
    })
}

/// Jacobian extremes over all Gauss points used in assembly.
pub fn quadrature_extremes(rect: &RectangleSpec, def: &Deformation) -> Result<JacobianExtremes> {
    rect.validate()?;
    let mut ext = JacobianExtremes::empty();
    for ey in 0..rect.ny {
        for ex in 0..rect.nx {
            for_each_gauss_point(rect, ex, ey, |x, y, _, _| ext.include(&def.jacobian(rect, x, y), x, y))?;
        }
    }
    Ok(ext)
}

#[cfg(test)]
mod tests {
    use super::super::deformation::DeformationFamily;
    use super::*;

    #[test]
    fn constants_are_in_the_kernel() {
        let r = RectangleSpec::new(0.5, 4.0, 6, 20).unwrap();
        for op in [
            assemble_reference_operator(&r).unwrap(),
            assemble_pulled_back_operator(&r, &Deformation::new(DeformationFamily::VerticalWave, 0.01)).unwrap(),
            assemble_pulled_back_operator(&r, &Deformation::new(DeformationFamily::Bulge, 0.02)).unwrap(),
        ] {
            let ones = vec![1.0; op.dim()];
            let mut y = vec![0.0; op.dim()];
            op.stiffness.mul_vec(&ones, &mut y);
            let scale = (0..op.dim()).map(|i| op.stiffness.get(i, i)).fold(0.0, f64::max);
            assert!(y.iter().all(|v| v.abs() <= 1e-13 * scale), "{:e}", y.iter().fold(0.0f64, |a, v| a.max(v.abs())));
            assert!(op.stiffness.is_exactly_symmetric());
            assert!(op.mass.iter().all(|&m| m > 0.0));
        }
    }

    #[test]
    fn mass_sums_to_area() {
        let r = RectangleSpec::new(0.1, 10.0, 7, 90).unwrap();
        let op = assemble_reference_operator(&r).unwrap();
        assert!((op.mass.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // The pulled-back mass integrates det J, which is the deformed area.
        let def = Deformation::new(DeformationFamily::Bulge, 0.05);
        let op = assemble_pulled_back_operator(&r, &def).unwrap();
        let exact = 1.0 + 0.05 * 2.0 / core::f64::consts::PI;
        assert!((op.mass.iter().sum::<f64>() - exact).abs() < 1e-4);
    }

    #[test]
    fn hand_assembled_unit_square() {
        // Element matrix of a bilinear square element of any size:
        // (1/6) [[4,-1,-1,-2], [-1,4,-2,-1], [-1,-2,4,-1], [-2,-1,-1,4]].
        let r = RectangleSpec::new(1.0, 1.0, 3, 3).unwrap();
        let op = assemble_reference_operator(&r).unwrap();
        let ke = [[4.0, -1.0, -1.0, -2.0], [-1.0, 4.0, -2.0, -1.0], [-1.0, -2.0, 4.0, -1.0], [-2.0, -1.0, -1.0, 4.0]];
        let n = 16;
        let mut dense = vec![0.0; n * n];
        let mut mass = vec![0.0; n];
        for ey in 0..3 {
            for ex in 0..3 {
                let nodes = [ey * 4 + ex, ey * 4 + ex + 1, (ey + 1) * 4 + ex, (ey + 1) * 4 + ex + 1];
                for a in 0..4 {
                    for b in 0..4 {
                        dense[nodes[a] * n + nodes[b]] += ke[a][b] / 6.0;
                    }
                    mass[nodes[a]] += 1.0 / 36.0;
                }
            }
        }
        let got = op.stiffness.to_dense();
        for k in 0..n * n {
            assert!((got[k] - dense[k]).abs() < 1e-13, "entry {k}: {} vs {}", got[k], dense[k]);
        }
        for i in 0..n {
            assert!((op.mass[i] - mass[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn trivial_deformations_reproduce_the_reference() {
        let r = RectangleSpec::new(0.5, 4.0, 5, 12).unwrap();
        let reference = assemble_reference_operator(&r).unwrap();
        for def in [
            Deformation::IDENTITY,
            Deformation::new(DeformationFamily::Bulge, 0.0),
            Deformation::new(DeformationFamily::VerticalWave, 0.0),
        ] {
            let op = assemble_pulled_back_operator(&r, &def).unwrap();
            assert_eq!(op, reference, "{def:?}");
        }
    }

    #[test]
    fn fold_is_rejected_at_assembly() {
        let r = RectangleSpec::new(0.5, 4.0, 5, 12).unwrap();
        let def = Deformation::new(DeformationFamily::Bulge, -2.0);
        assert!(matches!(assemble_pulled_back_operator(&r, &def), Err(Error::InvalidDeformation { .. })));
        assert!(quadrature_extremes(&r, &def).is_err());
    }

    #[test]
    fn bandwidth_covers_the_pattern() {
        let r = RectangleSpec::new(1.0, 2.0, 4, 7).unwrap();
        let op = assemble_reference_operator(&r).unwrap();
        let bw = (0..op.dim())
            .flat_map(|i| op.stiffness.row(i).0.iter().map(move |&j| i.abs_diff(j)))
            .max()
            .unwrap();
        assert_eq!(bw, op.bandwidth());
    }
}
