//! Dataset-specific preprocessing: benchmark crop, LiDAR occlusion filter and
//! density subsampling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::Sample;
use crate::error::{Error, Result};
use crate::raster::DepthMap;
use crate::scalar::Real;

pub const KITTI_TOP_CROP: usize = 100;
pub const KITTI_CROP_WIDTH: usize = 1216;
pub const KITTI_CROP_HEIGHT: usize = 240;

/// Window origin of the KITTI crop for a `width x height` frame: drop the top
/// 100 rows, then take the centered 1216x240 window of what remains.
pub fn kitti_crop_origin(width: usize, height: usize) -> Result<(usize, usize)> {
    if width < KITTI_CROP_WIDTH || height < KITTI_TOP_CROP + KITTI_CROP_HEIGHT {
        return Err(Error::Input(format!(
            "frame {width}x{height} is smaller than the {KITTI_CROP_WIDTH}x{KITTI_CROP_HEIGHT} crop after removing {KITTI_TOP_CROP} rows"
        )));
    }
    let x0 = (width - KITTI_CROP_WIDTH) / 2;
    let y0 = KITTI_TOP_CROP + (height - KITTI_TOP_CROP - KITTI_CROP_HEIGHT) / 2;
    Ok((x0, y0))
}

/// Apply the KITTI crop to every raster of a sample.
pub fn kitti_crop<T: Real>(s: &Sample<T>) -> Result<Sample<T>> {
    let (x0, y0) = kitti_crop_origin(s.rgb.width(), s.rgb.height())?;
    let (w, h) = (KITTI_CROP_WIDTH, KITTI_CROP_HEIGHT);
    Sample::new(
        s.id.clone(),
        s.rgb.crop(x0, y0, w, h)?,
        s.sparse.crop(x0, y0, w, h)?,
        s.gt.crop(x0, y0, w, h)?,
    )
}

/// Drop LiDAR points lying more than `tau` meters behind the nearest valid point
/// of their `window x window` neighborhood.
pub fn lidar_min_filter<T: Real>(z: &DepthMap<T>, window: usize, tau: T) -> Result<DepthMap<T>> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(Error::Config(format!("filter window must be odd, got {window}")));
    }
    let (w, h) = (z.width(), z.height());
    let r = window / 2;
    let mut out = z.clone();
    for (x, y, depth) in z.iter_valid() {
        let mut nearest = depth;
        for ny in y.saturating_sub(r)..=(y + r).min(h - 1) {
            for nx in x.saturating_sub(r)..=(x + r).min(w - 1) {
                if let Some(v) = z.get(nx, ny) {
                    nearest = nearest.min(v);
                }
            }
        }
        if depth - nearest > tau {
            out.invalidate(x, y);
        }
    }
    Ok(out)
}

/// Keep `min(n, available)` valid points drawn uniformly without replacement.
pub fn subsample_points<T: Real>(z: &DepthMap<T>, n: usize, seed: u64) -> DepthMap<T> {
    let valid: Vec<(usize, usize, T)> = z.iter_valid().collect();
    if n >= valid.len() {
        return z.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = DepthMap::new(z.width(), z.height());
    for i in rand::seq::index::sample(&mut rng, valid.len(), n) {
        let (x, y, v) = valid[i];
        out.set(x, y, v).expect("value taken from a valid cell");
    }
    out
}

/// Keep a fraction of the valid points, rounded to the nearest count.
pub fn subsample_fraction<T: Real>(z: &DepthMap<T>, fraction: f64, seed: u64) -> Result<DepthMap<T>> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::Config(format!("fraction must lie in [0, 1], got {fraction}")));
    }
    let n = (z.valid_count() as f64 * fraction).round() as usize;
    Ok(subsample_points(z, n, seed))
}
