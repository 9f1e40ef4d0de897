//! SVOL volume files.

use std::path::Path;

use seisflat_core::volume::{Dims, SeismicVolume};

use crate::{Error, Result};

pub const MAGIC: &[u8; 4] = b"SVOL";
pub const VERSION: u32 = 1;
/// Magic, version and three extents.
pub const HEADER_LEN: usize = 20;

pub fn encode(volume: &SeismicVolume) -> Result<Vec<u8>> {
    let d = volume.dims();
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * d.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for extent in [d.m, d.n, d.l] {
        let e = u32::try_from(extent)
            .map_err(|_| seisflat_core::Error::Dimension(format!("extent {extent} does not fit in 32 bits")))?;
        out.extend_from_slice(&e.to_le_bytes());
    }
    for v in volume.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

/// Parse an SVOL image. `path` only labels errors.
pub fn decode(bytes: &[u8], path: &Path) -> Result<SeismicVolume> {
    let fail = |offset: usize, reason: String| Error::Format { path: path.to_path_buf(), offset: offset as u64, reason };
    if bytes.len() < HEADER_LEN {
        return Err(fail(bytes.len(), format!("header needs {HEADER_LEN} bytes, file has {}", bytes.len())));
    }
    if &bytes[..4] != MAGIC {
        return Err(fail(0, format!("bad magic {:?}", String::from_utf8_lossy(&bytes[..4]))));
    }
    let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4-byte slice"));
    let version = word(4);
    if version != VERSION {
        return Err(fail(4, format!("unsupported version {version}")));
    }
    let extents = [word(8), word(12), word(16)];
    if let Some(axis) = extents.iter().position(|&e| e == 0) {
        return Err(fail(8 + 4 * axis, "zero extent".into()));
    }
    let dims = Dims::new(extents[0] as usize, extents[1] as usize, extents[2] as usize);
    let expected = dims
        .m
        .checked_mul(dims.n)
        .and_then(|x| x.checked_mul(dims.l))
        .and_then(|x| x.checked_mul(4))
        .ok_or_else(|| fail(8, "dimensions overflow".into()))?;
    let payload = &bytes[HEADER_LEN..];
    if payload.len() != expected {
        return Err(fail(
            HEADER_LEN + payload.len().min(expected),
            format!("expected {expected} payload bytes, found {}", payload.len()),
        ));
    }
    let values: Vec<f32> =
        payload.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().expect("4-byte chunk"))).collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(fail(HEADER_LEN + 4 * i, "non-finite value".into()));
    }
    Ok(SeismicVolume::new(dims, values)?)
}

pub fn save_volume(volume: &SeismicVolume, path: &Path) -> Result<()> {
    std::fs::write(path, encode(volume)?).map_err(Error::io(path))
}

pub fn load_volume(path: &Path) -> Result<SeismicVolume> {
    let bytes = std::fs::read(path).map_err(Error::io(path))?;
    decode(&bytes, path)
}
