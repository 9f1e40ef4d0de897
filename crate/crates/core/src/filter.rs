//! Adaptive PCA filtering.
//!
//! Every voxel is described by the 27 values of the 3×3×3 cube around it
//! (replicate padding at the border). The cubes are projected on their
//! leading principal direction to give one filtered value `w` per voxel, and
//! the cubes of `w` around each slice pixel become that pixel's feature.
//!
//! Cube entries are ordered depth offset slowest, third-axis offset fastest:
//! entry `(d1 + 1) · 9 + (d2 + 1) · 3 + (d3 + 1)` for offsets in `{-1, 0, 1}`.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{fix_sign, symmetric_eigen};
use crate::volume::{Dims, SeismicVolume, SliceRef};
use crate::{Error, Result};

pub const PATCH_LEN: usize = 27;

/// Offsets of the cube entries in storage order.
pub fn cube_offsets() -> impl Iterator<Item = (isize, isize, isize)> {
    (-1..=1).flat_map(|a| (-1..=1).flat_map(move |b| (-1..=1).map(move |c| (a, b, c))))
}

fn gather(values: &[f64], dims: Dims, i1: usize, i2: usize, i3: usize, out: &mut [f64]) {
    let (a, b, c) = (i1 as isize, i2 as isize, i3 as isize);
    for (k, (d1, d2, d3)) in cube_offsets().enumerate() {
        out[k] = values[dims.clamped_index(a + d1, b + d2, c + d3)];
    }
}

/// One 27-vector per voxel, in volume storage order.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchMatrix {
    dims: Dims,
    data: Vec<f64>,
}

impl PatchMatrix {
    pub fn dims(&self) -> Dims {
        self.dims
    }

    /// Number of columns (voxels).
    pub fn len(&self) -> usize {
        self.data.len() / PATCH_LEN
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn column(&self, voxel: usize) -> &[f64] {
        &self.data[voxel * PATCH_LEN..(voxel + 1) * PATCH_LEN]
    }

    /// Voxel coordinates of column `voxel`.
    pub fn pixel(&self, voxel: usize) -> (usize, usize, usize) {
        self.dims.coords(voxel)
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(PATCH_LEN)
    }
}

pub fn extract_patches(volume: &SeismicVolume) -> Result<PatchMatrix> {
    let dims = volume.dims();
    if dims.m < 3 || dims.n < 3 || dims.l < 3 {
        return Err(Error::Dimension(alloc::format!(
            "patch extraction needs dims of at least (3, 3, 3), got {dims:?}"
        )));
    }
    let values: Vec<f64> = volume.values().iter().map(|&v| v as f64).collect();
    let mut data = vec![0.0; dims.len() * PATCH_LEN];
    for (voxel, out) in data.chunks_exact_mut(PATCH_LEN).enumerate() {
        let (i1, i2, i3) = dims.coords(voxel);
        gather(&values, dims, i1, i2, i3, out);
    }
    Ok(PatchMatrix { dims, data })
}

/// Symmetric 27×27 matrix, row-major.
pub type Covariance = [f64; PATCH_LEN * PATCH_LEN];

/// Unbiased covariance `(1/(N−1)) · Ã Ãᵀ` of the centred patch columns.
///
/// Two passes: means first, then centred outer products accumulated in
/// column order.
pub fn feature_covariance(patches: &PatchMatrix) -> Result<Covariance> {
    let n = patches.len();
    if n < 2 {
        return Err(Error::Dimension(alloc::format!("covariance needs at least 2 patches, got {n}")));
    }
    let mut mean = [0.0; PATCH_LEN];
    for col in patches.columns() {
        for (m, v) in mean.iter_mut().zip(col) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= n as f64;
    }
    let mut cov = [0.0; PATCH_LEN * PATCH_LEN];
    let mut centred = [0.0; PATCH_LEN];
    for col in patches.columns() {
        for k in 0..PATCH_LEN {
            centred[k] = col[k] - mean[k];
        }
        for i in 0..PATCH_LEN {
            let ci = centred[i];
            for j in i..PATCH_LEN {
                cov[i * PATCH_LEN + j] += ci * centred[j];
            }
        }
    }
    let norm = 1.0 / (n - 1) as f64;
    for i in 0..PATCH_LEN {
        for j in i..PATCH_LEN {
            let v = cov[i * PATCH_LEN + j] * norm;
            cov[i * PATCH_LEN + j] = v;
            cov[j * PATCH_LEN + i] = v;
        }
    }
    Ok(cov)
}

/// Unit eigenvector of the largest eigenvalue of `cov`, first nonzero entry
/// positive. A zero matrix yields `e1`.
pub fn principal_component(cov: &Covariance) -> [f64; PATCH_LEN] {
    let mut u = [0.0; PATCH_LEN];
    if cov.iter().all(|&x| x == 0.0) {
        u[0] = 1.0;
        return u;
    }
    let (_, vectors) = symmetric_eigen(cov, PATCH_LEN);
    for (k, uk) in u.iter_mut().enumerate() {
        *uk = vectors[k * PATCH_LEN];
    }
    fix_sign(&mut u);
    u
}

/// Projected values `w(i) = u1ᵀ g(i)` over the whole volume, storage order.
pub fn filtered_values(patches: &PatchMatrix, u1: &[f64; PATCH_LEN]) -> Vec<f64> {
    patches.columns().map(|g| g.iter().zip(u1).map(|(a, b)| a * b).sum()).collect()
}

/// The complete filtering stage: principal direction plus filtered values.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredVolume {
    pub dims: Dims,
    pub principal: [f64; PATCH_LEN],
    pub values: Vec<f64>,
}

pub fn filter_volume(volume: &SeismicVolume) -> Result<FilteredVolume> {
    let patches = extract_patches(volume)?;
    let cov = feature_covariance(&patches)?;
    let principal = principal_component(&cov);
    let values = filtered_values(&patches, &principal);
    Ok(FilteredVolume { dims: volume.dims(), principal, values })
}

/// 27-vector features over the pixels of a 2D slice, row-major (depth rows).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureField {
    pub rows: usize,
    pub cols: usize,
    data: Vec<f64>,
}

impl FeatureField {
    /// Build from row-major per-pixel vectors; `data.len()` must be
    /// `rows · cols · 27`.
    pub fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        let expected = rows * cols * PATCH_LEN;
        if data.len() != expected {
            return Err(Error::Mismatch { what: "feature data", expected, actual: data.len() });
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "feature", index });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn feature(&self, pixel: usize) -> &[f64] {
        &self.data[pixel * PATCH_LEN..(pixel + 1) * PATCH_LEN]
    }

    /// `‖f(i) − f(j)‖₂²`
    pub fn distance_sq(&self, i: usize, j: usize) -> f64 {
        self.feature(i).iter().zip(self.feature(j)).map(|(a, b)| (a - b) * (a - b)).sum()
    }
}

/// Gather the 3×3×3 cube of `w` around each pixel of `slice`.
pub fn filtered_features(filtered: &FilteredVolume, slice: SliceRef) -> Result<FeatureField> {
    let dims = filtered.dims;
    if filtered.values.len() != dims.len() {
        return Err(Error::Mismatch { what: "filtered values", expected: dims.len(), actual: filtered.values.len() });
    }
    slice.validate(dims)?;
    let cols = slice.width(dims);
    let mut data = vec![0.0; dims.m * cols * PATCH_LEN];
    for (pixel, out) in data.chunks_exact_mut(PATCH_LEN).enumerate() {
        let (i1, i2, i3) = slice.volume_coords(pixel / cols, pixel % cols);
        gather(&filtered.values, dims, i1, i2, i3, out);
    }
    FeatureField::from_raw(dims.m, cols, data)
}
