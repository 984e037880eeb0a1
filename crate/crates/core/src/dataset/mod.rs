//! Samples, file formats, preprocessing and synthetic scenes.

pub mod pfm;
pub mod png_io;
mod preprocess;
mod synthetic;

pub use preprocess::{
    kitti_crop, kitti_crop_origin, lidar_min_filter, subsample_fraction, subsample_points,
    KITTI_CROP_HEIGHT, KITTI_CROP_WIDTH, KITTI_TOP_CROP,
};
pub use synthetic::{render_synthetic, snap_to_rig, synthetic_samples, Layer, Plane, SyntheticScene};

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::raster::{DepthMap, Image};
use crate::scalar::Real;

/// One depth-completion frame: guide image, sparse input and ground truth.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample<T> {
    pub id: String,
    pub rgb: Image<T>,
    pub sparse: DepthMap<T>,
    pub gt: DepthMap<T>,
}

impl<T: Real> Sample<T> {
    pub fn new(id: String, rgb: Image<T>, sparse: DepthMap<T>, gt: DepthMap<T>) -> Result<Self> {
        let (w, h) = (rgb.width(), rgb.height());
        for (name, m) in [("sparse", &sparse), ("ground truth", &gt)] {
            if m.width() != w || m.height() != h {
                return Err(Error::Input(format!(
                    "sample `{id}`: {name} is {}x{} but the image is {w}x{h}",
                    m.width(),
                    m.height()
                )));
            }
        }
        Ok(Self { id, rgb, sparse, gt })
    }

    pub fn width(&self) -> usize {
        self.rgb.width()
    }

    pub fn height(&self) -> usize {
        self.rgb.height()
    }
}

/// Depth from `.png` (16-bit, KITTI scale) or `.pfm` (float) by extension.
pub fn load_depth<T: Real>(path: impl AsRef<Path>) -> Result<DepthMap<T>> {
    let path = path.as_ref();
    match extension(path).as_str() {
        "png" => png_io::read_depth_png16(path, png_io::DEPTH_PNG_SCALE),
        "pfm" => pfm::read_map_pfm(path).map(|(m, _)| m),
        other => Err(Error::format(path, format!("unsupported depth format `.{other}`"))),
    }
}

pub fn save_depth<T: Real>(path: impl AsRef<Path>, map: &DepthMap<T>) -> Result<()> {
    let path = path.as_ref();
    match extension(path).as_str() {
        "png" => png_io::write_depth_png16(path, map, png_io::DEPTH_PNG_SCALE),
        "pfm" => pfm::write_map_pfm(path, map),
        other => Err(Error::format(path, format!("unsupported depth format `.{other}`"))),
    }
}

fn extension(path: &Path) -> String {
    path.extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase()
}

/// Line of a manifest file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestEntry {
    pub id: String,
    pub rgb: PathBuf,
    pub sparse: PathBuf,
    pub gt: PathBuf,
}

impl ManifestEntry {
    pub fn load<T: Real>(&self) -> Result<Sample<T>> {
        Sample::new(
            self.id.clone(),
            png_io::read_rgb_png(&self.rgb)?,
            load_depth(&self.sparse)?,
            load_depth(&self.gt)?,
        )
    }
}

/// Manifest: one sample per line as `[id] rgb_path sparse_path gt_path`,
/// whitespace separated, `#` comments. Without an id column the RGB file stem
/// is used. Relative paths resolve against the manifest's directory.
pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut entries = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        let (id, files) = match cols.len() {
            3 => (None, &cols[..]),
            4 => (Some(cols[0].to_string()), &cols[1..]),
            k => {
                return Err(Error::format(
                    path,
                    format!("line {}: expected 3 or 4 columns, got {k}", n + 1),
                ))
            }
        };
        let resolve = |p: &str| base.join(p);
        let rgb = resolve(files[0]);
        let id = id.unwrap_or_else(|| {
            rgb.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        });
        entries.push(ManifestEntry {
            id,
            rgb,
            sparse: resolve(files[1]),
            gt: resolve(files[2]),
        });
    }
    Ok(entries)
}

/// Write a manifest with paths relative to its directory.
pub fn write_manifest(path: impl AsRef<Path>, entries: &[(String, String, String, String)]) -> Result<()> {
    let path = path.as_ref();
    let mut text = String::from("# id rgb sparse gt\n");
    for (id, rgb, sparse, gt) in entries {
        text.push_str(&format!("{id} {rgb} {sparse} {gt}\n"));
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_rejects_dimension_mismatch() {
        let r = Sample::<f32>::new(
            "a".into(),
            Image::black(4, 3),
            DepthMap::new(4, 3),
            DepthMap::new(3, 4),
        );
        assert!(matches!(r, Err(Error::Input(_))));
    }

    #[test]
    fn manifest_columns() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.txt");
        std::fs::write(&p, "# header\nimg/a.png s/a.pfm g/a.pfm\nb x.png y.png z.png # note\n\n").unwrap();
        let m = read_manifest(&p).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[0].id, "a");
        assert_eq!(m[0].sparse, dir.path().join("s/a.pfm"));
        assert_eq!(m[1].id, "b");
        std::fs::write(&p, "only two\n").unwrap();
        assert!(read_manifest(&p).is_err());
    }

    #[test]
    fn depth_format_by_extension() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = DepthMap::<f32>::new(3, 2);
        m.set(1, 1, 2.5).unwrap();
        for name in ["d.png", "d.pfm"] {
            save_depth(dir.path().join(name), &m).unwrap();
            assert_eq!(load_depth::<f32>(dir.path().join(name)).unwrap(), m);
        }
        assert!(save_depth(dir.path().join("d.tif"), &m).is_err());
    }
}
