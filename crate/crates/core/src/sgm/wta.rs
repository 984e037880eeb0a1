//! Winner-takes-all disparity selection, sub-pixel refinement and left-right check.

use crate::raster::DisparityMap;
use crate::scalar::Real;
use crate::sgm::cost::CostVolume;

/// Lowest-cost disparity of a cost slice; the smallest index wins ties.
#[inline]
pub fn argmin(costs: &[u32]) -> usize {
    let mut best = 0;
    for (d, &c) in costs.iter().enumerate().skip(1) {
        if c < costs[best] {
            best = d;
        }
    }
    best
}

/// Vertex of the parabola through `(d-1, c_minus)`, `(d, c0)`, `(d+1, c_plus)`.
///
/// Returns `d` unchanged when the three costs are not strictly convex.
#[inline]
pub fn parabolic_subpixel(d: f64, c_minus: f64, c0: f64, c_plus: f64) -> f64 {
    let denom = c_minus - 2.0 * c0 + c_plus;
    if denom <= 0.0 {
        return d;
    }
    d + (c_minus - c_plus) / (2.0 * denom)
}

/// Integer winner per pixel of the reference view, row-major.
pub fn integer_disparities(sum: &CostVolume<u32>) -> Vec<usize> {
    (0..sum.height)
        .flat_map(|y| (0..sum.width).map(move |x| (x, y)))
        .map(|(x, y)| argmin(sum.pixel(x, y)))
        .collect()
}

/// Integer winner per pixel of the target view: `argmin_d S(x + d, d)`.
pub fn right_disparities(sum: &CostVolume<u32>) -> Vec<usize> {
    let (w, h, nd) = (sum.width, sum.height, sum.disparities);
    let mut out = vec![0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut best = 0;
            let mut best_cost = u32::MAX;
            for d in 0..nd.min(w - x) {
                let c = sum.get(x + d, y, d);
                if c < best_cost {
                    best_cost = c;
                    best = d;
                }
            }
            out[y * w + x] = best;
        }
    }
    out
}

/// Pixels of the reference view that fail `|d_L(x) - d_R(x - d_L(x))| <= threshold`,
/// as a row-major mask (true = consistent).
pub fn left_right_mask(left: &[usize], right: &[usize], width: usize, threshold: f64) -> Vec<bool> {
    left.iter()
        .enumerate()
        .map(|(i, &dl)| {
            let x = i % width;
            if dl > x {
                return false;
            }
            let dr = right[i - dl];
            (dl as f64 - dr as f64).abs() <= threshold
        })
        .collect()
}

/// Options for [`wta_disparity`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WtaOptions {
    pub subpixel: bool,
    /// Left-right consistency threshold in pixels, if enabled.
    pub lr_threshold: Option<f64>,
}

/// Disparity map from an aggregated volume.
///
/// Zero disparity means a point at infinity and is reported invalid, as are
/// pixels rejected by the left-right check.
pub fn wta_disparity<T: Real>(sum: &CostVolume<u32>, opts: WtaOptions) -> DisparityMap<T> {
    let (w, h, nd) = (sum.width, sum.height, sum.disparities);
    let left = integer_disparities(sum);
    let consistent = opts.lr_threshold.map(|t| {
        let right = right_disparities(sum);
        left_right_mask(&left, &right, w, t)
    });
    let mut out = DisparityMap::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if consistent.as_ref().is_some_and(|m| !m[i]) {
                continue;
            }
            let d = left[i];
            let mut value = d as f64;
            if opts.subpixel && d > 0 && d + 1 < nd {
                let c = sum.pixel(x, y);
                value = parabolic_subpixel(value, c[d - 1] as f64, c[d] as f64, c[d + 1] as f64);
            }
            if value > 0.0 {
                // value is finite and positive
                let _ = out.set(x, y, T::lit(value));
            }
        }
    }
    out
}
