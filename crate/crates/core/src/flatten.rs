//! Depth recovery from the first nontrivial diffusion eigenvector.
//!
//! On a tall thin rectangle of unit height the first Neumann eigenfunction
//! is `cos(π y)`. Mapping `ψ₁` affinely onto `[−1, 1]` and taking `arccos`
//! therefore recovers `π y`, a depth coordinate that is constant along
//! layers.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::volume::Image;
use crate::{Error, Result};

/// Negate `psi` if its mean over the top quarter of depth rows is below its
/// mean over the bottom quarter, so that depth maps increase downwards.
pub fn orient_first_eigenvector(psi: &[f64], rows: usize, cols: usize) -> Result<Vec<f64>> {
    if psi.len() != rows * cols || rows == 0 || cols == 0 {
        return Err(Error::Mismatch { what: "eigenvector", expected: rows * cols, actual: psi.len() });
    }
    let (lo, hi) = min_max(psi);
    if !(hi > lo) {
        return Err(Error::DegenerateSpectrum("first eigenvector is constant"));
    }
    let band = (rows / 4).max(1);
    let mean = |range: core::ops::Range<usize>| {
        let n = (range.len() * cols) as f64;
        range.flat_map(|r| psi[r * cols..(r + 1) * cols].iter()).sum::<f64>() / n
    };
    let top = mean(0..band);
    let bottom = mean(rows - band..rows);
    Ok(if top >= bottom { psi.to_vec() } else { psi.iter().map(|x| -x).collect() })
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)))
}

/// Per-pixel depth in `[0, π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    pub rows: usize,
    pub cols: usize,
    pub depth: Vec<f64>,
}

/// `h(i) = arccos(2 (ψ₁(i) − min) / (max − min) − 1)`.
pub fn depth_from_eigenvector(psi: &[f64], rows: usize, cols: usize) -> Result<DepthMap> {
    if psi.len() != rows * cols {
        return Err(Error::Mismatch { what: "eigenvector", expected: rows * cols, actual: psi.len() });
    }
    let (lo, hi) = min_max(psi);
    if !(hi > lo) {
        return Err(Error::DegenerateSpectrum("eigenvector has no range"));
    }
    let span = hi - lo;
    let depth = psi
        .iter()
        .map(|&x| libm::acos((2.0 * (x - lo) / span - 1.0).clamp(-1.0, 1.0)))
        .collect();
    Ok(DepthMap { rows, cols, depth })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudRecord {
    /// Original lateral (column) coordinate.
    pub x: usize,
    /// Recovered depth.
    pub h: f64,
    /// Original pixel value.
    pub value: f64,
}

/// One record per slice pixel, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FlattenedCloud {
    pub rows: usize,
    pub cols: usize,
    pub records: Vec<CloudRecord>,
}

pub fn reparameterize(slice: &Image, depth: &DepthMap) -> Result<FlattenedCloud> {
    if (slice.rows, slice.cols) != (depth.rows, depth.cols) {
        return Err(Error::Mismatch { what: "depth map", expected: slice.data.len(), actual: depth.depth.len() });
    }
    if slice.data.is_empty() {
        return Err(Error::Dimension("empty slice".into()));
    }
    let records = slice
        .data
        .iter()
        .zip(&depth.depth)
        .enumerate()
        .map(|(i, (&value, &h))| CloudRecord { x: i % slice.cols, h, value })
        .collect();
    Ok(FlattenedCloud { rows: slice.rows, cols: slice.cols, records })
}

/// Bin the cloud onto a `rows × cols` grid: column from `x`, row from the
/// nearest of `rows` evenly spaced depth levels on `[0, π]`. Bins receive the
/// mean of their records; empty bins are `None`.
pub fn bin_cloud(cloud: &FlattenedCloud) -> Vec<Option<f64>> {
    let (rows, cols) = (cloud.rows, cloud.cols);
    let mut sums = alloc::vec![(0.0, 0usize); rows * cols];
    let scale = if rows > 1 { (rows - 1) as f64 / PI } else { 0.0 };
    for rec in &cloud.records {
        let row = (libm::round(rec.h * scale) as usize).min(rows - 1);
        let bin = &mut sums[row * cols + rec.x];
        bin.0 += rec.value;
        bin.1 += 1;
    }
    sums.into_iter().map(|(s, n)| (n > 0).then(|| s / n as f64)).collect()
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
        let mut r = alloc::vec![0.0; v.len()];
        let mut s = 0;
        while s < idx.len() {
            let mut e = s + 1;
            while e < idx.len() && v[idx[e]] == v[idx[s]] {
                e += 1;
            }
            let avg = (s + e - 1) as f64 / 2.0;
            for &k in &idx[s..e] {
                r[k] = avg;
            }
            s = e;
        }
        r
    }
    assert_eq!(a.len(), b.len());
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / libm::sqrt(saa * sbb)
}
