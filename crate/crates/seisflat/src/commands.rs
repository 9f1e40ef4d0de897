//! The three subcommands, split into a pure part that produces file
//! contents and a thin part that writes them.

use std::path::{Path, PathBuf};

use seisflat_core::flatten::bin_cloud;
use seisflat_core::pipeline::{flatten_slice, FlattenOutput, PipelineConfig};
use seisflat_core::stability::{amplitude_for_target, verify_theorem, Deformation, ProjectionReport, VerifyConfig};
use seisflat_core::volume::{synthesize_volume, Image, SeismicVolume};

use crate::config::{AmplitudeChoice, RunConfig, VerifySection};
use crate::{csv, pgm, svol, Error, Result};

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(Error::io(path))
}

pub fn synth(cfg: &RunConfig, out: &Path) -> Result<SeismicVolume> {
    let volume = synthesize_volume(cfg.synth()?)?;
    svol::save_volume(&volume, out)?;
    Ok(volume)
}

/// Named file contents produced by one flattening run.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    /// Appended to the output prefix.
    pub suffix: &'static str,
    pub bytes: Vec<u8>,
}

pub fn flatten_artifacts(cfg: &RunConfig, volume: &SeismicVolume) -> Result<(FlattenOutput, Vec<Artifact>)> {
    let kernel = cfg.kernel()?;
    let config = PipelineConfig { slice: *cfg.slice()?, kernel: kernel.spec, eigen: *cfg.spectral()? };
    let out = flatten_slice(volume, &config)?;
    let (rows, cols) = (out.slice.rows, out.slice.cols);
    let mut psi: Vec<&[f64]> = vec![&out.psi1];
    psi.extend(out.spectrum.psi.iter().skip(2).map(Vec::as_slice));
    let depth_image = Image::new(rows, cols, out.depth.depth.clone())?;
    let mut files = vec![
        Artifact { suffix: "_eigen.csv", bytes: csv::eigenvector_table(rows, cols, &psi).into_bytes() },
        Artifact { suffix: "_depth.csv", bytes: csv::depth_table(&out.depth).into_bytes() },
        Artifact { suffix: "_flattened.csv", bytes: csv::cloud_table(&out.cloud).into_bytes() },
        Artifact { suffix: "_slice.pgm", bytes: pgm::render_image(&out.slice) },
        Artifact { suffix: "_depth.pgm", bytes: pgm::render_image(&depth_image) },
        Artifact { suffix: "_flattened.pgm", bytes: pgm::render_sparse(rows, cols, &bin_cloud(&out.cloud)) },
    ];
    if cfg.dump_filtered {
        files.push(Artifact {
            suffix: "_filtered.csv",
            bytes: csv::filtered_slice_table(&out.filtered, config.slice).into_bytes(),
        });
    }
    if kernel.dump {
        files.push(Artifact {
            suffix: "_kernel.csv",
            bytes: csv::triplet_table(out.operator.kernel().matrix()).into_bytes(),
        });
    }
    Ok((out, files))
}

pub fn artifact_path(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

/// Run the pipeline on the volume at `input` and write every artifact next
/// to `prefix`. Returns the run and the written paths.
pub fn flatten(cfg: &RunConfig, input: &Path, prefix: &Path) -> Result<(FlattenOutput, Vec<PathBuf>)> {
    let volume = svol::load_volume(input)?;
    let (out, files) = flatten_artifacts(cfg, &volume)?;
    let mut paths = Vec::with_capacity(files.len());
    for a in files {
        let path = artifact_path(prefix, a.suffix);
        write(&path, &a.bytes)?;
        paths.push(path);
    }
    Ok((out, paths))
}

/// Identity (if enabled) followed by every family at every amplitude.
pub fn deformation_catalog(v: &VerifySection) -> Result<Vec<Deformation>> {
    let mut catalog = Vec::new();
    if v.identity {
        catalog.push(Deformation::IDENTITY);
    }
    for &family in &v.families {
        match &v.amplitudes {
            AmplitudeChoice::Explicit(list) => catalog.extend(list.iter().map(|&a| Deformation::new(family, a))),
            AmplitudeChoice::Targets(list) => {
                for &t in list {
                    catalog.push(Deformation::new(family, amplitude_for_target(family, &v.rect, t, v.d, v.samples)?));
                }
            }
        }
    }
    Ok(catalog)
}

pub fn verify_reports(cfg: &RunConfig) -> Result<Vec<ProjectionReport>> {
    let v = cfg.verify()?;
    let config = VerifyConfig {
        rect: v.rect,
        catalog: deformation_catalog(v)?,
        ks: v.ks.clone(),
        d: v.d,
        samples: v.samples,
        tol: v.tol,
        lemma_slack: v.lemma_slack,
        seed: v.seed,
    };
    Ok(verify_theorem(&config)?)
}

/// Write the report and fail if any evaluated row fails.
pub fn verify(cfg: &RunConfig, out: &Path) -> Result<Vec<ProjectionReport>> {
    let reports = verify_reports(cfg)?;
    write(out, csv::report_table(&reports).as_bytes())?;
    let evaluated = reports.iter().filter(|r| !r.is_skipped()).count();
    let failed = reports.iter().filter(|r| !r.all_pass()).count();
    if failed > 0 {
        return Err(Error::VerificationFailed { failed, evaluated });
    }
    Ok(reports)
}
