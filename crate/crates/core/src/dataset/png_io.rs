//! 8-bit RGB and 16-bit depth PNG files.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use crate::error::{Error, Result};
use crate::raster::{DepthMap, Image};
use crate::scalar::Real;

/// KITTI depth PNG convention: meters = raw / 256, raw 0 = no measurement.
pub const DEPTH_PNG_SCALE: f64 = 256.0;

fn png_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Png {
        path: path.to_path_buf(),
        msg: e.to_string(),
    }
}

/// Quantize a `[0, 1]` sample to 8 bits as `round(v * 255)`.
#[inline]
pub fn quantize_u8<T: Real>(v: T) -> u8 {
    (v.as_f64() * 255.0).round().clamp(0.0, 255.0) as u8
}

pub fn write_png(
    path: &Path,
    width: usize,
    height: usize,
    color: png::ColorType,
    depth: png::BitDepth,
    data: &[u8],
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut enc = png::Encoder::new(BufWriter::new(file), width as u32, height as u32);
    enc.set_color(color);
    enc.set_depth(depth);
    let mut writer = enc.write_header().map_err(|e| png_err(path, e))?;
    writer.write_image_data(data).map_err(|e| png_err(path, e))?;
    writer.finish().map_err(|e| png_err(path, e))
}

struct Decoded {
    width: usize,
    height: usize,
    color: png::ColorType,
    depth: png::BitDepth,
    data: Vec<u8>,
}

fn read_png(path: &Path) -> Result<Decoded> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut dec = png::Decoder::new(BufReader::new(file));
    dec.set_transformations(png::Transformations::IDENTITY);
    let mut reader = dec.read_info().map_err(|e| png_err(path, e))?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| png_err(path, "image too large"))?;
    let mut data = vec![0; size];
    let info = reader.next_frame(&mut data).map_err(|e| png_err(path, e))?;
    data.truncate(info.buffer_size());
    Ok(Decoded {
        width: info.width as usize,
        height: info.height as usize,
        color: info.color_type,
        depth: info.bit_depth,
        data,
    })
}

pub fn write_rgb_png<T: Real>(path: impl AsRef<Path>, img: &Image<T>) -> Result<()> {
    let data: Vec<u8> = img.pixels().iter().flatten().map(|&v| quantize_u8(v)).collect();
    write_png(
        path.as_ref(),
        img.width(),
        img.height(),
        png::ColorType::Rgb,
        png::BitDepth::Eight,
        &data,
    )
}

/// 8-bit RGB, RGBA (alpha dropped) or grayscale PNG into `[0, 1]` samples.
pub fn read_rgb_png<T: Real>(path: impl AsRef<Path>) -> Result<Image<T>> {
    let path = path.as_ref();
    let png = read_png(path)?;
    if png.depth != png::BitDepth::Eight {
        return Err(Error::format(path, format!("expected 8-bit color, got {:?}", png.depth)));
    }
    let stride = match png.color {
        png::ColorType::Rgb => 3,
        png::ColorType::Rgba => 4,
        png::ColorType::Grayscale => 1,
        other => return Err(Error::format(path, format!("unsupported color type {other:?}"))),
    };
    let s = |v: u8| T::lit(v as f64 / 255.0);
    let pixels = png
        .data
        .chunks_exact(stride)
        .map(|c| {
            if stride == 1 {
                [s(c[0]); 3]
            } else {
                [s(c[0]), s(c[1]), s(c[2])]
            }
        })
        .collect();
    Image::from_pixels(png.width, png.height, pixels)
}

/// 16-bit grayscale depth PNG; `depth = raw / scale`, raw 0 is invalid.
pub fn read_depth_png16<T: Real>(path: impl AsRef<Path>, scale: f64) -> Result<DepthMap<T>> {
    let path = path.as_ref();
    let png = read_png(path)?;
    if png.depth != png::BitDepth::Sixteen || png.color != png::ColorType::Grayscale {
        return Err(Error::format(
            path,
            format!("expected 16-bit grayscale depth, got {:?} {:?}", png.color, png.depth),
        ));
    }
    let values = png
        .data
        .chunks_exact(2)
        .map(|b| {
            let raw = u16::from_be_bytes([b[0], b[1]]);
            T::lit(raw as f64 / scale)
        })
        .collect();
    DepthMap::from_values(png.width, png.height, values)
}

/// Inverse of [`read_depth_png16`]; depths are rounded to the `1/scale` grid and
/// must fit in 16 bits.
pub fn write_depth_png16<T: Real>(path: impl AsRef<Path>, map: &DepthMap<T>, scale: f64) -> Result<()> {
    let path = path.as_ref();
    let mut data = Vec::with_capacity(map.len() * 2);
    for (v, &ok) in map.values().iter().zip(map.mask()) {
        let raw = if ok { (v.as_f64() * scale).round() } else { 0.0 };
        if raw > u16::MAX as f64 {
            return Err(Error::Input(format!(
                "depth {v} exceeds the 16-bit range at scale {scale}"
            )));
        }
        data.extend_from_slice(&(raw as u16).to_be_bytes());
    }
    write_png(
        path,
        map.width(),
        map.height(),
        png::ColorType::Grayscale,
        png::BitDepth::Sixteen,
        &data,
    )
}
