use core::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use seisflat_core::stability::*;

fn rect(nx: usize, ny: usize) -> RectangleSpec {
    RectangleSpec::new(0.5, 4.0, nx, ny).unwrap()
}

fn reference(r: &RectangleSpec, count: usize) -> NeumannSpectrum {
    neumann_eigensolve(&assemble_reference_operator(r).unwrap(), count, 1e-9, 0).unwrap()
}

#[test]
fn refinement_reduces_error_at_second_order() {
    let analytic = analytic_rectangle_spectrum(0.5, 4.0, 5);
    let coarse = reference(&rect(8, 64), 5);
    let fine = reference(&rect(16, 128), 5);
    for j in 1..=5 {
        let (ec, ef) = (coarse.values[j] - analytic[j].eta, fine.values[j] - analytic[j].eta);
        let ratio = ec.abs() / ef.abs();
        assert!((3.0..=5.0).contains(&ratio), "mode {j}: {ec:e} -> {ef:e}");
        assert!(ef.abs() < 0.01 * analytic[j].eta);
    }
}

#[test]
fn discrete_modes_match_closed_form_shapes() {
    let r = rect(8, 64);
    let s = reference(&r, 3);
    let analytic = analytic_rectangle_spectrum(r.width, r.height, 3);
    for j in 1..=3 {
        let mode = analytic[j];
        let scale = 1.0 / mode.norm_sq(&r).sqrt();
        let sampled: Vec<f64> = (0..r.node_count())
            .map(|i| {
                let (x, y) = r.node_position(i);
                scale * mode.eval(&r, x, y)
            })
            .collect();
        let op = assemble_reference_operator(&r).unwrap();
        let overlap: f64 = sampled.iter().zip(&s.vectors[j]).zip(&op.mass).map(|((a, b), m)| a * b * m).sum();
        assert!(overlap.abs() > 0.999, "mode {j}: {overlap}");
    }
}

#[test]
fn coefficients_match_dense_oracle() {
    let r = rect(4, 16);
    let basis = reference(&r, 6);
    let def = Deformation::new(DeformationFamily::Bulge, 0.03);
    let op = assemble_pulled_back_operator(&r, &def).unwrap();
    let u = neumann_eigensolve(&op, 1, 1e-10, 5).unwrap().vectors[1].clone();
    let mass = assemble_reference_operator(&r).unwrap().mass;
    let alpha = expansion_coefficients(&u, &basis, &mass).unwrap();

    let n = u.len();
    let v = DMatrix::from_fn(n, basis.vectors.len(), |i, j| basis.vectors[j][i]);
    let m = DMatrix::from_diagonal(&DVector::from_column_slice(&mass));
    let oracle = v.transpose() * m * DVector::from_column_slice(&u);
    for (a, b) in alpha.iter().zip(oracle.iter()) {
        assert!((a - b).abs() < 1e-11);
    }
    assert!(expansion_coefficients(&u[1..], &basis, &mass).is_err());
}

#[test]
fn catalog_properties() {
    let r = rect(8, 64);
    let mut catalog = vec![Deformation::IDENTITY];
    for family in [DeformationFamily::VerticalWave, DeformationFamily::Bulge] {
        for target in [0.02, 0.05, 0.1] {
            catalog.push(Deformation::new(family, amplitude_for_target(family, &r, target, 2, 64).unwrap()));
        }
    }
    let cfg = VerifyConfig::new(r, catalog.clone(), vec![1, 2, 3, 4, 5, 6]);
    let reports = verify_theorem(&cfg).unwrap();
    for def in &catalog {
        let ext = jacobian_extremes(def, &r, 64).unwrap();
        let ed = 2.0 * ext.eps;
        assert!(ext.min_det >= 1.0 - 2.0 * ed - 1e-12 && ext.max_det <= 1.0 + 2.0 * ed + 1e-12);
        let rows: Vec<_> = reports.iter().filter(|p| p.family == def.family && p.amplitude == def.amplitude).collect();
        assert_eq!(rows.len(), 6);
        let mut previous = f64::INFINITY;
        for p in rows {
            let e = p.evaluation.as_ref().expect("in hypothesis");
            assert!(e.residual <= previous);
            previous = e.residual;
            let parseval: f64 = e.alpha.iter().map(|a| a * a).sum();
            assert!(parseval <= e.norm_sq + 1e-10);
            assert!(p.all_pass(), "{p:?}");
            assert!(e.residual.is_finite() && e.bound.is_finite() && e.mu1.is_finite());
        }
    }
}

#[test]
fn tall_rectangle_remark() {
    let modes = analytic_rectangle_spectrum(0.1, 10.0, 101);
    assert!(modes[1..=100].iter().enumerate().all(|(j, m)| m.p == 0 && m.q == j + 1));
    let eta1 = modes[1].eta;
    assert!((eta1 - PI * PI / 100.0).abs() < 1e-15);
    let b = theorem_bound_with_constant(eta1, modes[100].eta, 1e-3, 2).unwrap();
    assert!(b < 1e-3 / 200.0);
}
