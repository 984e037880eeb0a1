//! Portable float map (PFM) reader and writer.
//!
//! Header: `Pf` (one channel) or `PF` (three channels), then `width height`,
//! then a scale whose sign gives the byte order (negative = little-endian).
//! Rows are stored bottom to top. Files are always written little-endian with
//! scale `-1.0`.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::raster::{MaskedMap, Unit};
use crate::scalar::Real;

/// Decoded PFM with rows top to bottom, channels interleaved.
#[derive(Clone, Debug, PartialEq)]
pub struct Pfm {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub data: Vec<f32>,
}

pub fn encode_pfm(pfm: &Pfm) -> Vec<u8> {
    let tag = if pfm.channels == 3 { "PF" } else { "Pf" };
    let mut out = format!("{tag}\n{} {}\n-1.0\n", pfm.width, pfm.height).into_bytes();
    let row = pfm.width * pfm.channels;
    out.reserve(pfm.data.len() * 4);
    for y in (0..pfm.height).rev() {
        for v in &pfm.data[y * row..(y + 1) * row] {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn decode_pfm(bytes: &[u8], path: &Path) -> Result<Pfm> {
    let bad = |msg: &str| Error::format(path, msg.to_string());
    // three whitespace-delimited header tokens after the tag, then one whitespace byte
    let mut pos = 0;
    let mut tokens = Vec::with_capacity(4);
    while tokens.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        tokens.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("non-ASCII header"))?);
    }
    if pos >= bytes.len() {
        return Err(bad("missing raster data"));
    }
    pos += 1;
    let channels = match tokens[0] {
        "Pf" => 1,
        "PF" => 3,
        other => return Err(bad(&format!("unknown PFM tag `{other}`"))),
    };
    let width: usize = tokens[1].parse().map_err(|_| bad("bad width"))?;
    let height: usize = tokens[2].parse().map_err(|_| bad("bad height"))?;
    let scale: f32 = tokens[3].parse().map_err(|_| bad("bad scale"))?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(bad("scale must be non-zero"));
    }
    let little = scale < 0.0;
    let row = width * channels;
    let body = &bytes[pos..];
    if body.len() != row * height * 4 {
        return Err(bad(&format!(
            "expected {} bytes of raster data, found {}",
            row * height * 4,
            body.len()
        )));
    }
    let mut data = vec![0f32; row * height];
    for (i, chunk) in body.chunks_exact(4).enumerate() {
        let b = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if little { f32::from_le_bytes(b) } else { f32::from_be_bytes(b) };
        let (file_row, col) = (i / row.max(1), i % row.max(1));
        data[(height - 1 - file_row) * row + col] = v;
    }
    Ok(Pfm {
        width,
        height,
        channels,
        data,
    })
}

pub fn read_pfm(path: impl AsRef<Path>) -> Result<Pfm> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_pfm(&bytes, path)
}

pub fn write_pfm(path: impl AsRef<Path>, pfm: &Pfm) -> Result<()> {
    let path = path.as_ref();
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&encode_pfm(pfm)).map_err(|e| Error::io(path, e))
}

/// Single-channel map: invalid cells are written as `0.0`.
pub fn map_to_pfm<T: Real, U: Unit>(map: &MaskedMap<T, U>) -> Pfm {
    Pfm {
        width: map.width(),
        height: map.height(),
        channels: 1,
        data: map
            .values()
            .iter()
            .zip(map.mask())
            .map(|(v, &ok)| if ok { v.to_f32().unwrap_or(0.0) } else { 0.0 })
            .collect(),
    }
}

/// Counts of samples dropped while reading a map.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MaskStats {
    /// NaN or infinite samples.
    pub non_finite: usize,
    /// Zero or negative samples.
    pub non_positive: usize,
}

/// Single-channel PFM into a masked map; non-finite and non-positive samples are invalid.
pub fn pfm_to_map<T: Real, U: Unit>(pfm: &Pfm, path: &Path) -> Result<(MaskedMap<T, U>, MaskStats)> {
    if pfm.channels != 1 {
        return Err(Error::format(path, "expected a single-channel (Pf) map"));
    }
    let mut stats = MaskStats::default();
    let values = pfm
        .data
        .iter()
        .map(|&v| {
            if !v.is_finite() {
                stats.non_finite += 1;
            } else if v <= 0.0 {
                stats.non_positive += 1;
            }
            T::from_f32(v).unwrap_or_else(T::nan)
        })
        .collect();
    Ok((MaskedMap::from_values(pfm.width, pfm.height, values)?, stats))
}

pub fn read_map_pfm<T: Real, U: Unit>(path: impl AsRef<Path>) -> Result<(MaskedMap<T, U>, MaskStats)> {
    let path = path.as_ref();
    pfm_to_map(&read_pfm(path)?, path)
}

pub fn write_map_pfm<T: Real, U: Unit>(path: impl AsRef<Path>, map: &MaskedMap<T, U>) -> Result<()> {
    write_pfm(path, &map_to_pfm(map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::DisparityMap;
    use proptest::prelude::*;

    #[test]
    fn header_and_row_order() {
        let pfm = Pfm {
            width: 2,
            height: 2,
            channels: 1,
            data: vec![1.0, 2.0, 3.0, 4.0],
        };
        let bytes = encode_pfm(&pfm);
        assert!(bytes.starts_with(b"Pf\n2 2\n-1.0\n"));
        // bottom row first
        assert_eq!(&bytes[12..16], &3.0f32.to_le_bytes());
        assert_eq!(decode_pfm(&bytes, Path::new("x")).unwrap(), pfm);
    }

    #[test]
    fn big_endian_accepted() {
        let mut bytes = b"Pf\n1 1\n1.0\n".to_vec();
        bytes.extend_from_slice(&7.5f32.to_be_bytes());
        assert_eq!(decode_pfm(&bytes, Path::new("x")).unwrap().data, vec![7.5]);
    }

    #[test]
    fn truncated_rejected() {
        let mut bytes = b"Pf\n2 1\n-1.0\n".to_vec();
        bytes.extend_from_slice(&1.0f32.to_le_bytes());
        assert!(decode_pfm(&bytes, Path::new("x")).is_err());
        assert!(decode_pfm(b"P6\n1 1\n-1\n\0\0\0\0", Path::new("x")).is_err());
    }

    #[test]
    fn nan_is_masked_and_counted() {
        let pfm = Pfm {
            width: 3,
            height: 1,
            channels: 1,
            data: vec![f32::NAN, 2.0, 0.0],
        };
        let (m, stats): (DisparityMap<f64>, _) = pfm_to_map(&pfm, Path::new("x")).unwrap();
        assert_eq!(m.valid_count(), 1);
        assert_eq!(stats, MaskStats { non_finite: 1, non_positive: 1 });
    }

    proptest! {
        #[test]
        fn round_trip(w in 1usize..6, h in 1usize..6, seed in any::<u64>()) {
            let data: Vec<f32> = (0..w * h * 3)
                .map(|i| f32::from_bits((seed.rotate_left(i as u32) as u32) & 0x7f7f_ffff))
                .collect();
            let pfm = Pfm { width: w, height: h, channels: 3, data };
            prop_assert_eq!(decode_pfm(&encode_pfm(&pfm), Path::new("x")).unwrap(), pfm);
        }
    }
}
