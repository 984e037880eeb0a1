//! Left padding that keeps every warped pattern sample inside the target view.

use crate::raster::DisparityMap;
use crate::scalar::Real;

/// `max(0, ceil(max over valid pixels of d(x, y) - x))`.
pub fn compute_left_padding<T: Real>(d: &DisparityMap<T>) -> usize {
    footprint_padding(d, 1)
}

/// Padding for patches of `patch_size`: each point's disparity is carried by
/// every pixel of its (border-clipped) patch, the leftmost of which sits at
/// `max(0, x - patch_size / 2)`.
pub fn footprint_padding<T: Real>(d: &DisparityMap<T>, patch_size: usize) -> usize {
    let r = patch_size / 2;
    d.iter_valid()
        .map(|(x, _, disp)| {
            let left = T::from_usize(x.saturating_sub(r)).unwrap();
            (disp - left).ceil()
        })
        .filter(|v| *v > T::zero())
        .map(|v| v.to_usize().unwrap_or(0))
        .max()
        .unwrap_or(0)
}
