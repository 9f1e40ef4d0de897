//! Binary greyscale (P5) rendering.

use std::path::Path;

use seisflat_core::volume::Image;

use crate::{Error, Result};

/// Map values affinely onto 0..=255 (min to 0, max to 255). A constant
/// image, or one with no finite values, renders mid-grey.
pub fn to_grey(values: &[f64]) -> Vec<u8> {
    let (lo, hi) = values
        .iter()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if !(hi > lo) {
        return vec![128; values.len()];
    }
    values.iter().map(|&v| if v.is_finite() { (255.0 * (v - lo) / (hi - lo)).round() as u8 } else { 128 }).collect()
}

pub fn encode(rows: usize, cols: usize, pixels: &[u8]) -> Vec<u8> {
    let mut out = format!("P5\n{cols} {rows}\n255\n").into_bytes();
    out.extend_from_slice(pixels);
    out
}

pub fn render_image(image: &Image) -> Vec<u8> {
    encode(image.rows, image.cols, &to_grey(&image.data))
}

/// Render a grid where `None` cells are mid-grey.
pub fn render_sparse(rows: usize, cols: usize, cells: &[Option<f64>]) -> Vec<u8> {
    let values: Vec<f64> = cells.iter().map(|c| c.unwrap_or(f64::NAN)).collect();
    encode(rows, cols, &to_grey(&values))
}

pub fn render_pgm(image: &Image, path: &Path) -> Result<()> {
    std::fs::write(path, render_image(image)).map_err(Error::io(path))
}
