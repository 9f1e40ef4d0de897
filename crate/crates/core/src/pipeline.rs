//! End-to-end flattening of one slice: filtering, kernel construction and
//! layer organization, run in that order.

use crate::filter::{filter_volume, filtered_features, FeatureField, FilteredVolume};
use crate::flatten::{depth_from_eigenvector, orient_first_eigenvector, reparameterize, DepthMap, FlattenedCloud};
use crate::kernel::{build_affinity, NeighborhoodSpec};
use crate::spectral::{diffusion_spectrum, DiffusionOperator, EigenOptions, Spectrum};
use crate::volume::{extract_slice, Image, SeismicVolume, SliceRef};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub slice: SliceRef,
    pub kernel: NeighborhoodSpec,
    pub eigen: EigenOptions,
}

/// Stage that produced an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Filter,
    Kernel,
    Spectral,
    Flatten,
}

impl core::fmt::Display for Stage {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Stage::Filter => "filter",
            Stage::Kernel => "kernel",
            Stage::Spectral => "spectral",
            Stage::Flatten => "flatten",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageError {
    pub stage: Stage,
    pub source: Error,
}

impl core::fmt::Display for StageError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{} stage failed: {}", self.stage, self.source)
    }
}

impl core::error::Error for StageError {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        Some(&self.source)
    }
}

#[derive(Debug, Clone)]
pub struct FlattenOutput {
    pub slice: Image,
    pub filtered: FilteredVolume,
    pub features: FeatureField,
    pub operator: DiffusionOperator,
    pub spectrum: Spectrum,
    /// Oriented first nontrivial eigenvector of `P`.
    pub psi1: alloc::vec::Vec<f64>,
    pub depth: DepthMap,
    pub cloud: FlattenedCloud,
}

fn at(stage: Stage) -> impl Fn(Error) -> StageError {
    move |source| StageError { stage, source }
}

pub fn flatten_slice(volume: &SeismicVolume, config: &PipelineConfig) -> core::result::Result<FlattenOutput, StageError> {
    let slice = extract_slice(volume, config.slice).map_err(at(Stage::Filter))?;
    let filtered = filter_volume(volume).map_err(at(Stage::Filter))?;
    let features = filtered_features(&filtered, config.slice).map_err(at(Stage::Filter))?;
    let kernel = build_affinity(&features, &config.kernel).map_err(at(Stage::Kernel))?;
    let (operator, spectrum) = diffusion_spectrum(&kernel, &config.eigen).map_err(at(Stage::Spectral))?;
    let flatten = || -> Result<_> {
        // Without feature variation the kernel is the plain grid graph and
        // its eigenvectors say nothing about layers.
        if (1..features.len()).all(|i| features.feature(i) == features.feature(0)) {
            return Err(Error::DegenerateSpectrum("features are constant; no layer structure to organize"));
        }
        let psi = spectrum.psi.get(1).ok_or(Error::DegenerateSpectrum("no nontrivial eigenvector requested"))?;
        let psi1 = orient_first_eigenvector(psi, slice.rows, slice.cols)?;
        let depth = depth_from_eigenvector(&psi1, slice.rows, slice.cols)?;
        let cloud = reparameterize(&slice, &depth)?;
        Ok((psi1, depth, cloud))
    };
    let (psi1, depth, cloud) = flatten().map_err(at(Stage::Flatten))?;
    Ok(FlattenOutput { slice, filtered, features, operator, spectrum, psi1, depth, cloud })
}
