use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::{Error, Result};

/// Reference rectangle `[0, width] × [0, height]` with an `nx × ny` cell grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectangleSpec {
    pub width: f64,
    pub height: f64,
    pub nx: usize,
    pub ny: usize,
}

impl RectangleSpec {
    pub fn new(width: f64, height: f64, nx: usize, ny: usize) -> Result<Self> {
        let r = Self { width, height, nx, ny };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.height > 0.0 && self.width.is_finite() && self.height.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "rectangle sides must be positive, got {} × {}",
                self.width, self.height
            )));
        }
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::InvalidParameter(format!("grid {} × {} must be at least 2 × 2", self.nx, self.ny)));
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn node_count(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    /// Node index, `x` fastest.
    pub fn node(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    pub fn node_position(&self, node: usize) -> (f64, f64) {
        let (i, j) = (node % (self.nx + 1), node / (self.nx + 1));
        (i as f64 * self.width / self.nx as f64, j as f64 * self.height / self.ny as f64)
    }

    /// Same rectangle with a different grid.
    pub fn with_grid(&self, nx: usize, ny: usize) -> Self {
        Self { nx, ny, ..*self }
    }
}

/// Neumann eigenpair `cos(pπx/w) cos(qπy/h)` with eigenvalue
/// `π² (p²/w² + q²/h²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectangleMode {
    pub p: usize,
    pub q: usize,
    pub eta: f64,
}

impl RectangleMode {
    /// Unnormalized eigenfunction.
    pub fn eval(&self, rect: &RectangleSpec, x: f64, y: f64) -> f64 {
        libm::cos(self.p as f64 * PI * x / rect.width) * libm::cos(self.q as f64 * PI * y / rect.height)
    }

    /// `‖cos(pπx/w) cos(qπy/h)‖²_{L²}`
    pub fn norm_sq(&self, rect: &RectangleSpec) -> f64 {
        let half = |k: usize| if k == 0 { 1.0 } else { 0.5 };
        rect.area() * half(self.p) * half(self.q)
    }
}

/// The first `count + 1` modes (including the constant one), ascending.
///
/// Exact ties (equal up to 1e-12 relative) are ordered by `p`, then `q`, so
/// modes varying only in `y` come first.
pub fn analytic_rectangle_spectrum(width: f64, height: f64, count: usize) -> Vec<RectangleMode> {
    let mut modes = Vec::with_capacity((count + 1) * (count + 1));
    for p in 0..=count {
        for q in 0..=count {
            let eta = PI * PI * ((p * p) as f64 / (width * width) + (q * q) as f64 / (height * height));
            modes.push(RectangleMode { p, q, eta });
        }
    }
    modes.sort_by(|a, b| a.eta.total_cmp(&b.eta));
    let mut start = 0;
    while start < modes.len() {
        let mut end = start + 1;
        while end < modes.len() && modes[end].eta - modes[start].eta <= 1e-12 * modes[start].eta.max(f64::MIN_POSITIVE) {
            end += 1;
        }
        modes[start..end].sort_by_key(|m| (m.p, m.q));
        start = end;
    }
    modes.truncate(count + 1);
    modes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tall_thin_rectangle_starts_with_vertical_modes() {
        let modes = analytic_rectangle_spectrum(0.1, 10.0, 101);
        assert_eq!(modes[0], RectangleMode { p: 0, q: 0, eta: 0.0 });
        for j in 1..=100 {
            assert_eq!((modes[j].p, modes[j].q), (0, j), "mode {j}");
            let want = PI * PI * (j * j) as f64 / 100.0;
            assert!((modes[j].eta - want).abs() <= 1e-12 * want);
        }
        // (1, 0) ties with (0, 100) and follows it.
        assert_eq!((modes[101].p, modes[101].q), (1, 0));
    }

    #[test]
    fn unit_square() {
        let m = analytic_rectangle_spectrum(1.0, 1.0, 3);
        let pi2 = PI * PI;
        assert_eq!(m[0].eta, 0.0);
        assert_eq!((m[1].p, m[1].q, m[2].p, m[2].q), (0, 1, 1, 0));
        assert!((m[1].eta - pi2).abs() < 1e-14 && (m[2].eta - pi2).abs() < 1e-14);
        assert!((m[3].eta - 2.0 * pi2).abs() < 1e-13);
    }

    #[test]
    fn rectangle_validation() {
        assert!(RectangleSpec::new(0.0, 1.0, 4, 4).is_err());
        assert!(RectangleSpec::new(1.0, 1.0, 1, 4).is_err());
        let r = RectangleSpec::new(0.5, 4.0, 2, 3).unwrap();
        assert_eq!(r.node_count(), 12);
        assert_eq!(r.node_position(r.node(2, 3)), (0.5, 4.0));
    }
}
