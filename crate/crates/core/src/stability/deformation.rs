use alloc::format;
use core::f64::consts::PI;

use super::rectangle::RectangleSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeformationFamily {
    Identity,
    /// `φ(x, y) = (x, y + a sin(πx/w) sin(πy/h))`
    VerticalWave,
    /// `φ(x, y) = (x (1 + a sin(πy/h)), y)`
    Bulge,
}

impl DeformationFamily {
    pub fn name(&self) -> &'static str {
        match self {
            DeformationFamily::Identity => "identity",
            DeformationFamily::VerticalWave => "vertical-wave",
            DeformationFamily::Bulge => "bulge",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [Self::Identity, Self::VerticalWave, Self::Bulge].into_iter().find(|f| f.name() == name)
    }
}

impl core::fmt::Display for DeformationFamily {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// A closed-form deformation of a reference rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deformation {
    pub family: DeformationFamily,
    pub amplitude: f64,
}

impl Deformation {
    pub const IDENTITY: Self = Self { family: DeformationFamily::Identity, amplitude: 0.0 };

    pub fn new(family: DeformationFamily, amplitude: f64) -> Self {
        Self { family, amplitude }
    }

    pub fn map(&self, rect: &RectangleSpec, x: f64, y: f64) -> (f64, f64) {
        let (w, h, a) = (rect.width, rect.height, self.amplitude);
        match self.family {
            DeformationFamily::Identity => (x, y),
            DeformationFamily::VerticalWave => (x, y + a * libm::sin(PI * x / w) * libm::sin(PI * y / h)),
            DeformationFamily::Bulge => (x * (1.0 + a * libm::sin(PI * y / h)), y),
        }
    }

    /// `J[i][j] = ∂φ_i/∂x_j`.
    pub fn jacobian(&self, rect: &RectangleSpec, x: f64, y: f64) -> [[f64; 2]; 2] {
        let (w, h, a) = (rect.width, rect.height, self.amplitude);
        match self.family {
            DeformationFamily::Identity => [[1.0, 0.0], [0.0, 1.0]],
            DeformationFamily::VerticalWave => {
                let (sx, cx) = (libm::sin(PI * x / w), libm::cos(PI * x / w));
                let (sy, cy) = (libm::sin(PI * y / h), libm::cos(PI * y / h));
                [[1.0, 0.0], [a * PI / w * cx * sy, 1.0 + a * PI / h * sx * cy]]
            }
            DeformationFamily::Bulge => {
                let (sy, cy) = (libm::sin(PI * y / h), libm::cos(PI * y / h));
                [[1.0 + a * sy, x * a * PI / h * cy], [0.0, 1.0]]
            }
        }
    }
}

pub(crate) fn det(j: &[[f64; 2]; 2]) -> f64 {
    j[0][0] * j[1][1] - j[0][1] * j[1][0]
}

/// Singular values `(σ_max, σ_min)` of a 2×2 matrix.
pub fn singular_values(j: &[[f64; 2]; 2]) -> (f64, f64) {
    let e = 0.5 * (j[0][0] + j[1][1]);
    let f = 0.5 * (j[0][0] - j[1][1]);
    let g = 0.5 * (j[1][0] + j[0][1]);
    let h = 0.5 * (j[1][0] - j[0][1]);
    let q = libm::hypot(e, h);
    let r = libm::hypot(f, g);
    (q + r, (q - r).abs())
}

/// Sup-norm deviations of a Jacobian field from the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianExtremes {
    /// `max(σ_max − 1, 1 − σ_min)`
    pub eps: f64,
    /// `max |det J − 1|`
    pub delta: f64,
    pub min_det: f64,
    pub max_det: f64,
}

impl JacobianExtremes {
    pub(crate) fn empty() -> Self {
        Self { eps: 0.0, delta: 0.0, min_det: f64::INFINITY, max_det: f64::NEG_INFINITY }
    }

    /// Fold the Jacobian at `(x, y)` in, rejecting non-positive determinants.
    pub(crate) fn include(&mut self, j: &[[f64; 2]; 2], x: f64, y: f64) -> Result<()> {
        let d = det(j);
        if !(d > 0.0) {
            return Err(Error::InvalidDeformation { x, y, det: d });
        }
        let (smax, smin) = singular_values(j);
        self.eps = self.eps.max(smax - 1.0).max(1.0 - smin);
        self.delta = self.delta.max((d - 1.0).abs());
        self.min_det = self.min_det.min(d);
        self.max_det = self.max_det.max(d);
        Ok(())
    }

    pub fn merge(self, other: Self) -> Self {
        Self {
            eps: self.eps.max(other.eps),
            delta: self.delta.max(other.delta),
            min_det: self.min_det.min(other.min_det),
            max_det: self.max_det.max(other.max_det),
        }
    }
}

/// Extremes over a `samples × samples` grid covering the closed rectangle.
pub fn jacobian_extremes(def: &Deformation, rect: &RectangleSpec, samples: usize) -> Result<JacobianExtremes> {
    if samples < 32 {
        return Err(Error::InvalidParameter(format!("need at least 32 samples per axis, got {samples}")));
    }
    let mut ext = JacobianExtremes::empty();
    let step = |len: f64, i: usize| len * i as f64 / (samples - 1) as f64;
    for iy in 0..samples {
        let y = step(rect.height, iy);
        for ix in 0..samples {
            let x = step(rect.width, ix);
            ext.include(&def.jacobian(rect, x, y), x, y)?;
        }
    }
    Ok(ext)
}

/// Amplitude `a ≥ 0` for which the sampled `ε_meas · d` equals `target`, by
/// bisection. The result never overshoots the target.
pub fn amplitude_for_target(
    family: DeformationFamily,
    rect: &RectangleSpec,
    target: f64,
    d: usize,
    samples: usize,
) -> Result<f64> {
    if family == DeformationFamily::Identity {
        return Err(Error::InvalidParameter("the identity has no amplitude to tune".into()));
    }
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::InvalidParameter(format!("target {target} must be positive")));
    }
    let scaled = |a: f64| -> Result<Option<f64>> {
        match jacobian_extremes(&Deformation::new(family, a), rect, samples) {
            Ok(e) => Ok(Some(e.eps * d as f64)),
            Err(Error::InvalidDeformation { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let below = |a: f64| -> Result<bool> { Ok(scaled(a)?.is_some_and(|v| v <= target)) };
    let (mut lo, mut hi) = (0.0, 1e-3 * rect.width.min(rect.height));
    while below(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::InvalidParameter(format!("target {target} is not reachable")));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
