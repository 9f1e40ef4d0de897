//! Volume data model, synthetic seismic generation and slice extraction.
//!
//! Volumes are `m × n × l` with the first axis (`i1`) as depth. Values are
//! stored with the third index fastest: `(i1, i2, i3)` lives at
//! `(i1 · n + i2) · l + i3`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::rng::SplitMix64;
use crate::{Error, Result};

/// Extents `(m, n, l)`; `m` is depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub m: usize,
    pub n: usize,
    pub l: usize,
}

impl Dims {
    pub fn new(m: usize, n: usize, l: usize) -> Self {
        Self { m, n, l }
    }

    pub fn len(&self) -> usize {
        self.m * self.n * self.l
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i1: usize, i2: usize, i3: usize) -> usize {
        (i1 * self.n + i2) * self.l + i3
    }

    /// Index of `(i1, i2, i3)` after clamping each signed coordinate into
    /// the volume (replicate padding).
    #[inline]
    pub fn clamped_index(&self, i1: isize, i2: isize, i3: isize) -> usize {
        let c = |v: isize, ext: usize| v.clamp(0, ext as isize - 1) as usize;
        self.index(c(i1, self.m), c(i2, self.n), c(i3, self.l))
    }

    pub fn coords(&self, idx: usize) -> (usize, usize, usize) {
        let i3 = idx % self.l;
        let rest = idx / self.l;
        (rest / self.n, rest % self.n, i3)
    }
}

/// Scalar field over a [`Dims`] grid. Every value is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SeismicVolume {
    dims: Dims,
    values: Vec<f32>,
}

impl SeismicVolume {
    pub fn new(dims: Dims, values: Vec<f32>) -> Result<Self> {
        if dims.m == 0 || dims.n == 0 || dims.l == 0 {
            return Err(Error::Dimension(format!("volume dims {dims:?} must all be at least 1")));
        }
        if values.len() != dims.len() {
            return Err(Error::Mismatch { what: "volume values", expected: dims.len(), actual: values.len() });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "volume value", index });
        }
        Ok(Self { dims, values })
    }

    pub fn constant(dims: Dims, value: f32) -> Result<Self> {
        Self::new(dims, alloc::vec![value; dims.len()])
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn get(&self, i1: usize, i2: usize, i3: usize) -> f32 {
        self.values[self.dims.index(i1, i2, i3)]
    }
}

/// Which non-depth axis a 2D slice holds fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceAxis {
    /// Fix `i2`; the slice spans `(i1, i3)`.
    Second,
    /// Fix `i3`; the slice spans `(i1, i2)`.
    Third,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SliceRef {
    pub axis: SliceAxis,
    pub index: usize,
}

impl SliceRef {
    pub fn new(axis: SliceAxis, index: usize) -> Self {
        Self { axis, index }
    }

    /// Width (lateral extent) of the slice inside `dims`.
    pub fn width(&self, dims: Dims) -> usize {
        match self.axis {
            SliceAxis::Second => dims.l,
            SliceAxis::Third => dims.n,
        }
    }

    pub fn validate(&self, dims: Dims) -> Result<()> {
        let extent = match self.axis {
            SliceAxis::Second => dims.n,
            SliceAxis::Third => dims.l,
        };
        if self.index >= extent {
            return Err(Error::OutOfRange { what: "slice", index: self.index, extent });
        }
        Ok(())
    }

    /// Volume coordinates of slice pixel `(row, col)`.
    pub fn volume_coords(&self, row: usize, col: usize) -> (usize, usize, usize) {
        match self.axis {
            SliceAxis::Second => (row, self.index, col),
            SliceAxis::Third => (row, col, self.index),
        }
    }
}

/// Row-major 2D image; row index is depth.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Image {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Mismatch { what: "image data", expected: rows * cols, actual: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }
}

pub fn extract_slice(volume: &SeismicVolume, slice: SliceRef) -> Result<Image> {
    let dims = volume.dims();
    slice.validate(dims)?;
    let width = slice.width(dims);
    let mut data = Vec::with_capacity(dims.m * width);
    for row in 0..dims.m {
        for col in 0..width {
            let (i1, i2, i3) = slice.volume_coords(row, col);
            data.push(volume.get(i1, i2, i3) as f64);
        }
    }
    Image::new(dims.m, width, data)
}

/// Parameters of the layered synthetic model
/// `v = Σ amp · sin(2π · freq · (i1 + warp(i2, i3))) + noise`.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub dims: Dims,
    /// `(frequency in cycles per depth sample, amplitude)`.
    pub layer_frequencies: Vec<(f64, f64)>,
    /// Peak lateral displacement of the layers, in samples.
    pub warp_amplitude: f64,
    /// Warp cycles across the lateral extents.
    pub warp_frequency: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SynthSpec {
    /// `warp(i2, i3) = A · sin(2π f i2 / n) · cos(2π f i3 / l)`
    pub fn warp(&self, i2: usize, i3: usize) -> f64 {
        let f = self.warp_frequency;
        self.warp_amplitude
            * libm::sin(2.0 * PI * f * i2 as f64 / self.dims.n as f64)
            * libm::cos(2.0 * PI * f * i3 as f64 / self.dims.l as f64)
    }

    /// Warped depth `i1 + warp(i2, i3)`; surfaces of constant value are layers.
    pub fn phase(&self, i1: usize, i2: usize, i3: usize) -> f64 {
        i1 as f64 + self.warp(i2, i3)
    }

    /// Peak amplitude of the noiseless signal, `Σ |amp|`.
    pub fn signal_amplitude(&self) -> f64 {
        self.layer_frequencies.iter().map(|(_, a)| a.abs()).sum()
    }

    fn validate(&self) -> Result<()> {
        let d = self.dims;
        if d.m == 0 || d.n == 0 || d.l == 0 {
            return Err(Error::Dimension(format!("synthetic dims {d:?} contain a zero extent")));
        }
        if d.m < 4 || d.n < 4 || d.l < 4 {
            return Err(Error::Dimension(format!("synthetic dims {d:?} must be at least (4, 4, 4)")));
        }
        let finite = |x: f64| x.is_finite();
        if !(self.noise_sigma >= 0.0 && finite(self.noise_sigma)) {
            return Err(Error::InvalidParameter(format!("noise_sigma {} must be >= 0", self.noise_sigma)));
        }
        if !(self.warp_amplitude >= 0.0 && finite(self.warp_amplitude)) {
            return Err(Error::InvalidParameter(format!("warp_amplitude {} must be >= 0", self.warp_amplitude)));
        }
        if !finite(self.warp_frequency) || self.layer_frequencies.iter().any(|&(f, a)| !finite(f) || !finite(a)) {
            return Err(Error::InvalidParameter("non-finite synthetic parameter".into()));
        }
        Ok(())
    }
}

/// Generate the synthetic volume. Noise is drawn in storage order from a
/// [`SplitMix64`] seeded with `spec.seed`, so the output is a pure function
/// of the spec.
pub fn synthesize_volume(spec: &SynthSpec) -> Result<SeismicVolume> {
    spec.validate()?;
    let dims = spec.dims;
    let mut rng = SplitMix64::new(spec.seed);
    let mut values = Vec::with_capacity(dims.len());
    for i1 in 0..dims.m {
        for i2 in 0..dims.n {
            for i3 in 0..dims.l {
                let phase = spec.phase(i1, i2, i3);
                let mut v: f64 = spec
                    .layer_frequencies
                    .iter()
                    .map(|&(freq, amp)| amp * libm::sin(2.0 * PI * freq * phase))
                    .sum();
                if spec.noise_sigma > 0.0 {
                    v += spec.noise_sigma * rng.next_normal();
                }
                values.push(v as f32);
            }
        }
    }
    SeismicVolume::new(dims, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn spec(dims: Dims) -> SynthSpec {
        SynthSpec {
            dims,
            layer_frequencies: vec![(1.0 / 9.0, 1.0), (1.0 / 5.3, 0.5)],
            warp_amplitude: 2.0,
            warp_frequency: 1.0,
            noise_sigma: 0.1,
            seed: 42,
        }
    }

    #[test]
    fn no_layers_no_noise_is_zero() {
        let mut s = spec(Dims::new(8, 6, 5));
        s.layer_frequencies.clear();
        s.noise_sigma = 0.0;
        let v = synthesize_volume(&s).unwrap();
        assert!(v.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn unwarped_rows_are_constant() {
        let mut s = spec(Dims::new(10, 7, 6));
        s.warp_amplitude = 0.0;
        s.noise_sigma = 0.0;
        let v = synthesize_volume(&s).unwrap();
        for i1 in 0..10 {
            let first = v.get(i1, 0, 0);
            for i2 in 0..7 {
                for i3 in 0..6 {
                    assert_eq!(v.get(i1, i2, i3), first);
                }
            }
        }
        let img = extract_slice(&v, SliceRef::new(SliceAxis::Third, 2)).unwrap();
        for r in 0..img.rows {
            assert!((0..img.cols).all(|c| img.get(r, c) == img.get(r, 0)));
        }
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let s = spec(Dims::new(32, 32, 8));
        assert_eq!(synthesize_volume(&s).unwrap(), synthesize_volume(&s).unwrap());
        let mut t = s.clone();
        t.seed = 43;
        assert_ne!(synthesize_volume(&s).unwrap(), synthesize_volume(&t).unwrap());
    }

    #[test]
    fn noiseless_value_follows_phase() {
        let mut s = spec(Dims::new(16, 12, 6));
        s.noise_sigma = 0.0;
        let v = synthesize_volume(&s).unwrap();
        for (i1, i2, i3) in [(0, 0, 0), (5, 3, 2), (15, 11, 5)] {
            let p = s.phase(i1, i2, i3);
            let expect = libm::sin(2.0 * PI * p / 9.0) + 0.5 * libm::sin(2.0 * PI * p / 5.3);
            assert_eq!(v.get(i1, i2, i3), expect as f32);
        }
    }

    #[test]
    fn rejects_small_or_bad_specs() {
        assert!(matches!(synthesize_volume(&spec(Dims::new(0, 4, 4))), Err(Error::Dimension(_))));
        assert!(matches!(synthesize_volume(&spec(Dims::new(3, 4, 4))), Err(Error::Dimension(_))));
        let mut s = spec(Dims::new(4, 4, 4));
        s.noise_sigma = -1.0;
        assert!(synthesize_volume(&s).is_err());
        let mut s = spec(Dims::new(4, 4, 4));
        s.warp_amplitude = -0.5;
        assert!(synthesize_volume(&s).is_err());
    }

    #[test]
    fn slice_matches_direct_indexing() {
        let v = synthesize_volume(&spec(Dims::new(9, 7, 5))).unwrap();
        let raw = v.values();
        let d = v.dims();
        for idx in 0..5 {
            let img = extract_slice(&v, SliceRef::new(SliceAxis::Third, idx)).unwrap();
            assert_eq!((img.rows, img.cols), (9, 7));
            for r in 0..9 {
                for c in 0..7 {
                    assert_eq!(img.get(r, c), raw[(r * d.n + c) * d.l + idx] as f64);
                }
            }
        }
        for idx in 0..7 {
            let img = extract_slice(&v, SliceRef::new(SliceAxis::Second, idx)).unwrap();
            assert_eq!((img.rows, img.cols), (9, 5));
            for r in 0..9 {
                for c in 0..5 {
                    assert_eq!(img.get(r, c), raw[(r * d.n + idx) * d.l + c] as f64);
                }
            }
        }
    }

    #[test]
    fn constant_volume_gives_constant_slice() {
        let v = SeismicVolume::constant(Dims::new(4, 5, 6), 2.5).unwrap();
        let img = extract_slice(&v, SliceRef::new(SliceAxis::Second, 4)).unwrap();
        assert!(img.data.iter().all(|&x| x == 2.5));
    }

    #[test]
    fn slice_index_out_of_range() {
        let v = SeismicVolume::constant(Dims::new(4, 5, 6), 0.0).unwrap();
        assert!(matches!(
            extract_slice(&v, SliceRef::new(SliceAxis::Third, 6)),
            Err(Error::OutOfRange { index: 6, extent: 6, .. })
        ));
        assert!(extract_slice(&v, SliceRef::new(SliceAxis::Second, 5)).is_err());
    }

    #[test]
    fn rejects_non_finite_values() {
        let mut vals = vec![0.0f32; 8];
        vals[3] = f32::NAN;
        assert!(matches!(
            SeismicVolume::new(Dims::new(2, 2, 2), vals),
            Err(Error::NonFinite { index: 3, .. })
        ));
    }

    #[test]
    fn coords_roundtrip() {
        let d = Dims::new(3, 4, 5);
        for idx in 0..d.len() {
            let (a, b, c) = d.coords(idx);
            assert_eq!(d.index(a, b, c), idx);
        }
        assert_eq!(d.clamped_index(-1, 4, 7), d.index(0, 3, 4));
    }
}
