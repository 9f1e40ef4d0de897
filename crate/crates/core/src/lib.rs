//! Diffusion-geometry seismic flattening and a numerical laboratory for the
//! stability of Neumann Laplacian eigenfunctions under domain deformation.
//!
//! The crate is `no_std` and only needs `alloc`. All transcendental functions
//! go through [`libm`], so results are bit-identical across platforms.
//!
//! Pipeline:
//!
//! 1. [`volume`] synthesizes or wraps an `m × n × l` volume (depth first).
//! 2. [`filter`] summarizes every 3×3×3 patch by its principal-component
//!    projection and gathers the projected values into 27-vector features.
//! 3. [`kernel`] builds the anisotropic affinity over a 2D slice.
//! 4. [`spectral`] normalizes it into a diffusion operator and computes its
//!    leading eigenvectors.
//! 5. [`flatten`] turns the first nontrivial eigenvector into a depth map.
//!
//! [`stability`] assembles reference and pulled-back Neumann problems on
//! rectangles and compares measured projection residuals with the
//! theoretical bound.
#![no_std]

extern crate alloc;

mod error;
pub mod filter;
pub mod flatten;
pub mod kernel;
pub mod krylov;
pub mod linalg;
pub mod pipeline;
pub mod rng;
pub mod spectral;
pub mod stability;
pub mod volume;

pub use error::{Error, Result};
