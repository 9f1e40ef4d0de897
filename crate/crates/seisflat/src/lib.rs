//! File formats, run configuration and subcommands of the `seisflat` tool.
//!
//! Volumes are stored in SVOL, a small little-endian container: the ASCII
//! magic `SVOL`, a `u32` version (1), the dimensions `m n l` as `u32`, and
//! `m·n·l` `f32` values with the third index fastest.

pub mod commands;
pub mod config;
pub mod csv;
mod error;
pub mod pgm;
pub mod svol;

pub use error::{Error, Result};
