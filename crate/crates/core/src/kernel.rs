//! Anisotropic affinity over the pixels of a 2D slice.
//!
//! Pixel `i` is connected to its propagation disc `N_r(i)` with weight
//! `exp(−‖f(i) − f(j)‖² / (β M(i)))`, where the local scale `M(i)` is the
//! largest squared feature distance over the coarse calibration lattice
//! `C_R(i)` and `β = −1/ln δ`. At the calibration scale the weight equals the
//! floor `δ`. Pixels are indexed row-major, `row · cols + col`.

use alloc::format;
use alloc::vec::Vec;

use crate::filter::FeatureField;
use crate::linalg::CsrMatrix;
use crate::{Error, Result};

/// Lattice modulus of the calibration neighbourhood. Pixels three apart have
/// non-overlapping 3×3 feature footprints.
pub const CALIBRATION_STRIDE: i64 = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborhoodSpec {
    /// Radius `r` of the propagation disc (strict `<`).
    pub propagation_radius: f64,
    /// Radius `R` of the calibration lattice (strict `<`).
    pub calibration_radius: f64,
    /// Floor `δ ∈ (0, 1)` of the affinity at calibration scale.
    pub delta_floor: f64,
}

impl Default for NeighborhoodSpec {
    fn default() -> Self {
        Self { propagation_radius: 2.0, calibration_radius: 5.0, delta_floor: 1e-7 }
    }
}

impl NeighborhoodSpec {
    pub fn new(propagation_radius: f64, calibration_radius: f64, delta_floor: f64) -> Result<Self> {
        let spec = Self { propagation_radius, calibration_radius, delta_floor };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let (r, big_r, d) = (self.propagation_radius, self.calibration_radius, self.delta_floor);
        if !(r > 0.0 && r < big_r && big_r.is_finite()) {
            return Err(Error::InvalidParameter(format!("radii must satisfy 0 < r < R, got r = {r}, R = {big_r}")));
        }
        if !(d > 0.0 && d < 1.0) {
            return Err(Error::InvalidParameter(format!("delta_floor {d} must lie in (0, 1)")));
        }
        Ok(())
    }

    /// Kernel bandwidth `β = −1 / ln δ`.
    pub fn bandwidth(&self) -> f64 {
        -1.0 / libm::log(self.delta_floor)
    }
}

/// Integer offsets `(d_row, d_col)` with `d_row² + d_col² < radius²`, limited
/// to multiples of `stride`, in row-major order.
fn disc_offsets(radius: f64, stride: i64) -> Vec<(i64, i64)> {
    let reach = libm::ceil(radius) as i64;
    let r2 = radius * radius;
    let mut out = Vec::new();
    for dr in -reach..=reach {
        for dc in -reach..=reach {
            if dr % stride == 0 && dc % stride == 0 && ((dr * dr + dc * dc) as f64) < r2 {
                out.push((dr, dc));
            }
        }
    }
    out
}

fn clipped(pixel: usize, rows: usize, cols: usize, offsets: &[(i64, i64)]) -> Vec<usize> {
    let (r, c) = ((pixel / cols) as i64, (pixel % cols) as i64);
    offsets
        .iter()
        .filter_map(|&(dr, dc)| {
            let (rr, cc) = (r + dr, c + dc);
            (rr >= 0 && cc >= 0 && rr < rows as i64 && cc < cols as i64).then(|| rr as usize * cols + cc as usize)
        })
        .collect()
}

/// `N_r(i)`: pixels at Euclidean distance `< r`, clipped to the slice,
/// ascending pixel index. Always contains `pixel`.
pub fn propagation_neighborhood(pixel: usize, spec: &NeighborhoodSpec, rows: usize, cols: usize) -> Vec<usize> {
    clipped(pixel, rows, cols, &disc_offsets(spec.propagation_radius, 1))
}

/// `C_R(i)`: pixels at distance `< R` whose row and column offsets are both
/// multiples of three, clipped to the slice. Always contains `pixel`.
pub fn calibration_neighborhood(pixel: usize, spec: &NeighborhoodSpec, rows: usize, cols: usize) -> Vec<usize> {
    clipped(pixel, rows, cols, &disc_offsets(spec.calibration_radius, CALIBRATION_STRIDE))
}

/// `M(i) = max_{j ∈ C_R(i)} ‖f(i) − f(j)‖²`
pub fn local_scale(pixel: usize, features: &FeatureField, spec: &NeighborhoodSpec) -> f64 {
    calibration_neighborhood(pixel, spec, features.rows, features.cols)
        .into_iter()
        .map(|j| features.distance_sq(pixel, j))
        .fold(0.0, f64::max)
}

pub fn local_scales(features: &FeatureField, spec: &NeighborhoodSpec) -> Vec<f64> {
    let offsets = disc_offsets(spec.calibration_radius, CALIBRATION_STRIDE);
    (0..features.len())
        .map(|i| {
            clipped(i, features.rows, features.cols, &offsets)
                .into_iter()
                .map(|j| features.distance_sq(i, j))
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Weight of one directed edge given the squared feature distance and the
/// row's local scale.
///
/// Written as `δ^(d²/M)`, which equals `exp(−d²/(β M))`; `pow` returns `δ`
/// exactly at `d² = M`, so the floor holds without rounding slack. A zero
/// scale falls back to the indicator of equal features.
pub fn edge_weight(dist_sq: f64, scale: f64, delta_floor: f64) -> f64 {
    if scale > 0.0 {
        libm::pow(delta_floor, dist_sq / scale)
    } else if dist_sq == 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Asymmetric kernel `W` (row `i` supported on `N_r(i)`). Exact zeros from
/// the degenerate rule are not stored.
pub fn affinity_weights(features: &FeatureField, spec: &NeighborhoodSpec) -> Result<CsrMatrix> {
    spec.validate()?;
    let scales = local_scales(features, spec);
    let offsets = disc_offsets(spec.propagation_radius, 1);
    let rows = (0..features.len())
        .map(|i| {
            clipped(i, features.rows, features.cols, &offsets)
                .into_iter()
                .filter_map(|j| {
                    let w = edge_weight(features.distance_sq(i, j), scales[i], spec.delta_floor);
                    (w != 0.0).then_some((j, w))
                })
                .collect()
        })
        .collect();
    CsrMatrix::from_rows(features.len(), rows)
}

/// Symmetric kernel `K = ½(W + Wᵀ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseAffinity {
    matrix: CsrMatrix,
}

impl SparseAffinity {
    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    /// Wrap a matrix that is already exactly symmetric.
    pub fn from_symmetric(matrix: CsrMatrix) -> Result<Self> {
        if !matrix.is_exactly_symmetric() {
            return Err(Error::InvalidParameter("affinity matrix is not exactly symmetric".into()));
        }
        Ok(Self { matrix })
    }
}

/// `K(i, j) = ½ (W(i, j) + W(j, i))` on the union of both patterns.
/// IEEE addition commutes, so `K(i, j)` and `K(j, i)` are bitwise equal.
pub fn symmetrize(w: &CsrMatrix) -> Result<SparseAffinity> {
    if w.nrows() != w.ncols() {
        return Err(Error::Mismatch { what: "kernel columns", expected: w.nrows(), actual: w.ncols() });
    }
    let wt = w.transpose();
    let rows = (0..w.nrows())
        .map(|i| {
            let (ca, va) = w.row(i);
            let (cb, vb) = wt.row(i);
            let (mut a, mut b) = (0, 0);
            let mut row = Vec::with_capacity(ca.len().max(cb.len()));
            while a < ca.len() || b < cb.len() {
                let (j, x, y) = match (ca.get(a), cb.get(b)) {
                    (Some(&ja), Some(&jb)) if ja == jb => {
                        a += 1;
                        b += 1;
                        (ja, va[a - 1], vb[b - 1])
                    }
                    (Some(&ja), Some(&jb)) if ja < jb => {
                        a += 1;
                        (ja, va[a - 1], 0.0)
                    }
                    (Some(&ja), None) => {
                        a += 1;
                        (ja, va[a - 1], 0.0)
                    }
                    (_, Some(&jb)) => {
                        b += 1;
                        (jb, 0.0, vb[b - 1])
                    }
                    (None, None) => unreachable!(),
                };
                row.push((j, 0.5 * (x + y)));
            }
            row
        })
        .collect();
    Ok(SparseAffinity { matrix: CsrMatrix::from_rows(w.ncols(), rows)? })
}

/// `K` straight from features.
pub fn build_affinity(features: &FeatureField, spec: &NeighborhoodSpec) -> Result<SparseAffinity> {
    symmetrize(&affinity_weights(features, spec)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::PATCH_LEN;
    use crate::rng::SplitMix64;
    use alloc::vec;
    use alloc::vec::Vec;

    /// Oracle: every pixel of the grid tested against the distance rule.
    fn brute_disc(pixel: usize, rows: usize, cols: usize, radius: f64, lattice: bool) -> Vec<usize> {
        let (r0, c0) = ((pixel / cols) as f64, (pixel % cols) as f64);
        (0..rows * cols)
            .filter(|&j| {
                let (r, c) = ((j / cols) as f64, (j % cols) as f64);
                let (dr, dc) = (r - r0, c - c0);
                let on_lattice = !lattice || (dr % 3.0 == 0.0 && dc % 3.0 == 0.0);
                on_lattice && libm::sqrt(dr * dr + dc * dc) < radius
            })
            .collect()
    }

    fn scalar_features(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> FeatureField {
        let mut data = vec![0.0; rows * cols * PATCH_LEN];
        for r in 0..rows {
            for c in 0..cols {
                data[(r * cols + c) * PATCH_LEN] = f(r, c);
            }
        }
        FeatureField::from_raw(rows, cols, data).unwrap()
    }

    fn random_features(rows: usize, cols: usize, seed: u64) -> FeatureField {
        let mut rng = SplitMix64::new(seed);
        let data = (0..rows * cols * PATCH_LEN).map(|_| rng.next_normal()).collect();
        FeatureField::from_raw(rows, cols, data).unwrap()
    }

    #[test]
    fn propagation_examples() {
        let s1 = NeighborhoodSpec::new(1.0, 4.0, 1e-7).unwrap();
        assert_eq!(propagation_neighborhood(5 * 12 + 5, &s1, 12, 12), vec![65]);
        let s2 = NeighborhoodSpec::default();
        let interior = propagation_neighborhood(5 * 12 + 5, &s2, 12, 12);
        assert_eq!(interior.len(), 9);
        assert_eq!(interior, brute_disc(65, 12, 12, 2.0, false));
        assert_eq!(propagation_neighborhood(0, &s2, 12, 12), vec![0, 1, 12, 13]);
        for p in [0, 11, 77, 143] {
            assert_eq!(propagation_neighborhood(p, &s2, 12, 12), brute_disc(p, 12, 12, 2.0, false));
        }
    }

    #[test]
    fn calibration_examples() {
        let cols = 12;
        let at = |r: usize, c: usize| r * cols + c;
        let s4 = NeighborhoodSpec::new(2.0, 4.0, 1e-7).unwrap();
        let mut got = calibration_neighborhood(at(5, 5), &s4, 12, 12);
        got.sort();
        let mut want = vec![at(5, 5), at(2, 5), at(8, 5), at(5, 2), at(5, 8)];
        want.sort();
        assert_eq!(got, want);
        let s1 = NeighborhoodSpec::new(0.5, 1.0, 1e-7).unwrap();
        assert_eq!(calibration_neighborhood(at(5, 5), &s1, 12, 12), vec![at(5, 5)]);
        let s5 = NeighborhoodSpec::default();
        let c5 = calibration_neighborhood(at(5, 5), &s5, 12, 12);
        assert_eq!(c5.len(), 9);
        for p in [0, 5, 40, 143] {
            assert_eq!(calibration_neighborhood(p, &s5, 12, 12), brute_disc(p, 12, 12, 5.0, true));
        }
    }

    #[test]
    fn local_scale_examples() {
        let spec = NeighborhoodSpec::new(2.0, 4.0, 1e-7).unwrap();
        let f = scalar_features(12, 12, |_, _| 3.0);
        assert_eq!(local_scale(30, &f, &spec), 0.0);
        let f = scalar_features(12, 12, |r, _| r as f64);
        assert_eq!(local_scale(5 * 12 + 5, &f, &spec), 9.0);

        let f = random_features(10, 9, 4);
        let spec = NeighborhoodSpec::default();
        let scales = local_scales(&f, &spec);
        for i in 0..f.len() {
            let oracle = brute_disc(i, 10, 9, 5.0, true)
                .into_iter()
                .map(|j| (0..PATCH_LEN).map(|k| (f.feature(i)[k] - f.feature(j)[k]).powi(2)).sum::<f64>())
                .fold(0.0, f64::max);
            assert_eq!(scales[i], oracle);
            assert_eq!(local_scale(i, &f, &spec), oracle);
        }
    }

    #[test]
    fn weight_examples() {
        let d = 1e-7;
        assert_eq!(edge_weight(0.0, 2.0, d), 1.0);
        assert_eq!(edge_weight(2.0, 2.0, d), d);
        assert!((edge_weight(1.0, 2.0, d) - libm::sqrt(d)).abs() < 1e-18);
        // exp form agrees with the power form
        let beta = NeighborhoodSpec::default().bandwidth();
        let exp_form = libm::exp(-0.7 / (beta * 1.3));
        assert!((edge_weight(0.7, 1.3, d) - exp_form).abs() < 1e-15);
        assert_eq!(edge_weight(0.0, 0.0, d), 1.0);
        assert_eq!(edge_weight(0.1, 0.0, d), 0.0);
    }

    #[test]
    fn invalid_specs() {
        assert!(NeighborhoodSpec::new(2.0, 2.0, 1e-7).is_err());
        assert!(NeighborhoodSpec::new(0.0, 2.0, 1e-7).is_err());
        assert!(NeighborhoodSpec::new(2.0, 5.0, 1.0).is_err());
        assert!(NeighborhoodSpec::new(2.0, 5.0, 0.0).is_err());
    }

    #[test]
    fn symmetrize_examples() {
        let sym = CsrMatrix::from_rows(2, vec![vec![(0, 1.0), (1, 0.3)], vec![(0, 0.3), (1, 1.0)]]).unwrap();
        assert_eq!(symmetrize(&sym).unwrap().matrix(), &sym);
        let d = 1e-7;
        let asym = CsrMatrix::from_rows(2, vec![vec![(0, 1.0), (1, d)], vec![(1, 1.0)]]).unwrap();
        let k = symmetrize(&asym).unwrap();
        assert_eq!(k.get(0, 1), d / 2.0);
        assert_eq!(k.get(1, 0), d / 2.0);
    }

    #[test]
    fn kernel_matches_dense_oracle() {
        let (rows, cols) = (12, 12);
        let f = random_features(rows, cols, 77);
        let spec = NeighborhoodSpec::default();
        let k = build_affinity(&f, &spec).unwrap();
        let n = rows * cols;
        // Dense oracle with the exp form of the weight.
        let beta = -1.0 / libm::log(spec.delta_floor);
        let mut w = vec![0.0; n * n];
        for i in 0..n {
            let m = brute_disc(i, rows, cols, 5.0, true)
                .into_iter()
                .map(|j| f.distance_sq(i, j))
                .fold(0.0, f64::max);
            for j in brute_disc(i, rows, cols, 2.0, false) {
                w[i * n + j] = libm::exp(-f.distance_sq(i, j) / (beta * m));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let oracle = 0.5 * (w[i * n + j] + w[j * n + i]);
                assert!((k.get(i, j) - oracle).abs() < 1e-14, "({i},{j})");
            }
        }
        assert!(k.matrix().is_exactly_symmetric());
        for i in 0..n {
            assert_eq!(k.get(i, i), 1.0);
        }
    }

    #[test]
    fn degenerate_rows_use_equality_indicator() {
        // Left half constant, right half ramps: rows in the flat region with
        // a flat calibration lattice get M = 0.
        let f = scalar_features(6, 12, |_, c| if c < 6 { 0.0 } else { c as f64 });
        let spec = NeighborhoodSpec::new(2.0, 2.5, 1e-7).unwrap();
        let scales = local_scales(&f, &spec);
        let w = affinity_weights(&f, &spec).unwrap();
        let i = 2 * 12 + 1;
        assert_eq!(scales[i], 0.0);
        let (cols, vals) = w.row(i);
        assert!(vals.iter().all(|&v| v == 1.0));
        assert_eq!(cols, &propagation_neighborhood(i, &spec, 6, 12)[..]);
        // Row 5 touches column 6, where features differ: that edge is dropped.
        let j = 2 * 12 + 5;
        assert_eq!(scales[j], 0.0);
        assert_eq!(w.get(j, 2 * 12 + 6), 0.0);
        let k = symmetrize(&w).unwrap();
        assert_eq!(k.get(j, j), 1.0);
    }

    #[test]
    fn floor_law_and_range() {
        let f = random_features(15, 11, 3);
        let spec = NeighborhoodSpec::default();
        let scales = local_scales(&f, &spec);
        let w = affinity_weights(&f, &spec).unwrap();
        for i in 0..f.len() {
            let (cols, vals) = w.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                assert!((0.0..=1.0).contains(&v));
                if scales[i] > 0.0 && f.distance_sq(i, j) <= scales[i] {
                    assert!(v >= spec.delta_floor);
                }
            }
            assert_eq!(w.get(i, i), 1.0);
        }
    }
}
