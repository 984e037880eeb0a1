//! Row-major rasters: masked scalar maps (depth, disparity) and RGB images.

use std::fmt;
use std::marker::PhantomData;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Unit marker for a [`MaskedMap`].
pub trait Unit: Copy + Default + fmt::Debug + Send + Sync + 'static {
    const NAME: &'static str;
}

/// Metric depth.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Meters;

/// Horizontal disparity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Pixels;

impl Unit for Meters {
    const NAME: &'static str = "depth";
}

impl Unit for Pixels {
    const NAME: &'static str = "disparity";
}

/// A width x height grid of scalars with a validity mask.
///
/// Invalid cells carry no meaning; their stored value is zero.
#[derive(Clone, PartialEq)]
pub struct MaskedMap<T, U> {
    width: usize,
    height: usize,
    values: Vec<T>,
    valid: Vec<bool>,
    _unit: PhantomData<U>,
}

/// Sparse or dense metric depth map.
pub type DepthMap<T> = MaskedMap<T, Meters>;
/// Sparse or dense disparity map.
pub type DisparityMap<T> = MaskedMap<T, Pixels>;

impl<T, U: Unit> fmt::Debug for MaskedMap<T, U> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct(U::NAME)
            .field("width", &self.width)
            .field("height", &self.height)
            .field("valid", &self.valid.iter().filter(|&&v| v).count())
            .finish()
    }
}

impl<T: Real, U: Unit> MaskedMap<T, U> {
    /// All-invalid map.
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            values: vec![T::zero(); width * height],
            valid: vec![false; width * height],
            _unit: PhantomData,
        }
    }

    /// Build from raw values; every finite value strictly greater than zero is valid.
    pub fn from_values(width: usize, height: usize, values: Vec<T>) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::Input(format!(
                "{} raster of {}x{} needs {} values, got {}",
                U::NAME,
                width,
                height,
                width * height,
                values.len()
            )));
        }
        let mut map = Self::new(width, height);
        for (i, v) in values.into_iter().enumerate() {
            if v.is_finite() && v > T::zero() {
                map.values[i] = v;
                map.valid[i] = true;
            }
        }
        Ok(map)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        debug_assert!(x < self.width && y < self.height);
        y * self.width + x
    }

    /// Value at `(x, y)` if valid.
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Option<T> {
        let i = self.index(x, y);
        self.valid[i].then(|| self.values[i])
    }

    #[inline]
    pub fn is_valid(&self, x: usize, y: usize) -> bool {
        self.valid[self.index(x, y)]
    }

    /// Store a valid value. Non-finite or non-positive values are rejected.
    pub fn set(&mut self, x: usize, y: usize, v: T) -> Result<()> {
        if !(v.is_finite() && v > T::zero()) {
            return Err(Error::Input(format!(
                "{} at ({x},{y}) must be finite and positive, got {v}",
                U::NAME
            )));
        }
        let i = self.index(x, y);
        self.values[i] = v;
        self.valid[i] = true;
        Ok(())
    }

    pub fn invalidate(&mut self, x: usize, y: usize) {
        let i = self.index(x, y);
        self.values[i] = T::zero();
        self.valid[i] = false;
    }

    /// Raw value storage; invalid cells hold zero.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.valid
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    /// Iterate `(x, y, value)` over valid cells in row-major order.
    pub fn iter_valid(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        let w = self.width.max(1);
        self.values
            .iter()
            .zip(&self.valid)
            .enumerate()
            .filter(|(_, (_, &ok))| ok)
            .map(move |(i, (&v, _))| (i % w, i / w, v))
    }

    /// Largest valid value, if any.
    pub fn max_valid(&self) -> Option<T> {
        self.iter_valid().map(|(_, _, v)| v).reduce(T::max)
    }

    /// Convert scalar precision, keeping the mask.
    pub fn cast<S: Real>(&self) -> MaskedMap<S, U> {
        MaskedMap {
            width: self.width,
            height: self.height,
            values: self
                .values
                .iter()
                .map(|v| S::from_f64(v.as_f64()).unwrap_or_else(S::zero))
                .collect(),
            valid: self.valid.clone(),
            _unit: PhantomData,
        }
    }

    /// Copy the window starting at `(x0, y0)` of size `w x h`.
    pub fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> Result<Self> {
        if x0 + w > self.width || y0 + h > self.height {
            return Err(Error::Input(format!(
                "crop {w}x{h}+{x0}+{y0} exceeds {} raster {}x{}",
                U::NAME,
                self.width,
                self.height
            )));
        }
        let mut out = Self::new(w, h);
        for y in 0..h {
            let src = (y0 + y) * self.width + x0;
            let dst = y * w;
            out.values[dst..dst + w].copy_from_slice(&self.values[src..src + w]);
            out.valid[dst..dst + w].copy_from_slice(&self.valid[src..src + w]);
        }
        Ok(out)
    }

    /// Same mask and dimensions as `other`.
    pub fn same_shape<V: Unit>(&self, other: &MaskedMap<T, V>) -> bool {
        self.width == other.width && self.height == other.height
    }
}

/// Three-channel color image with samples in `[0, 1]`.
#[derive(Clone, PartialEq)]
pub struct Image<T> {
    width: usize,
    height: usize,
    pixels: Vec<[T; 3]>,
}

impl<T> fmt::Debug for Image<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Image")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish()
    }
}

impl<T: Real> Image<T> {
    /// All-black image.
    pub fn black(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            pixels: vec![[T::zero(); 3]; width * height],
        }
    }

    pub fn filled(width: usize, height: usize, color: [T; 3]) -> Result<Self> {
        Self::from_pixels(width, height, vec![color; width * height])
    }

    pub fn from_pixels(width: usize, height: usize, pixels: Vec<[T; 3]>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::Input(format!(
                "image of {width}x{height} needs {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        if let Some(p) = pixels
            .iter()
            .flatten()
            .find(|v| !(**v >= T::zero() && **v <= T::one()))
        {
            return Err(Error::Input(format!("image sample {p} outside [0, 1]")));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> [T; 3] {
        self.pixels[y * self.width + x]
    }

    /// Caller guarantees samples stay in `[0, 1]`.
    #[inline]
    pub(crate) fn put(&mut self, x: usize, y: usize, c: [T; 3]) {
        self.pixels[y * self.width + x] = c;
    }

    pub fn pixels(&self) -> &[[T; 3]] {
        &self.pixels
    }

    /// Rec. 601 luma of the pixel at `(x, y)`.
    #[inline]
    pub fn luma(&self, x: usize, y: usize) -> T {
        luma(self.get(x, y))
    }

    /// Luma plane, row-major.
    pub fn luma_plane(&self) -> Vec<T> {
        self.pixels.iter().map(|&c| luma(c)).collect()
    }

    pub fn is_black(&self, x: usize, y: usize) -> bool {
        self.get(x, y).iter().all(|v| v.is_zero())
    }

    pub fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> Result<Self> {
        if x0 + w > self.width || y0 + h > self.height {
            return Err(Error::Input(format!(
                "crop {w}x{h}+{x0}+{y0} exceeds image {}x{}",
                self.width, self.height
            )));
        }
        let mut pixels = Vec::with_capacity(w * h);
        for y in 0..h {
            let row = (y0 + y) * self.width + x0;
            pixels.extend_from_slice(&self.pixels[row..row + w]);
        }
        Ok(Self {
            width: w,
            height: h,
            pixels,
        })
    }

    pub fn cast<S: Real>(&self) -> Image<S> {
        Image {
            width: self.width,
            height: self.height,
            pixels: self
                .pixels
                .iter()
                .map(|c| c.map(|v| S::from_f64(v.as_f64()).unwrap_or_else(S::zero)))
                .collect(),
        }
    }
}

#[inline]
pub fn luma<T: Real>(c: [T; 3]) -> T {
    T::lit(0.299) * c[0] + T::lit(0.587) * c[1] + T::lit(0.114) * c[2]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_values_masks_nonpositive_and_nonfinite() {
        let m = DepthMap::<f64>::from_values(2, 2, vec![1.0, 0.0, -3.0, f64::NAN]).unwrap();
        assert_eq!(m.valid_count(), 1);
        assert_eq!(m.get(0, 0), Some(1.0));
        assert_eq!(m.get(1, 0), None);
        assert_eq!(m.values()[3], 0.0);
    }

    #[test]
    fn set_rejects_zero() {
        let mut m = DisparityMap::<f32>::new(3, 3);
        assert!(m.set(1, 1, 0.0).is_err());
        assert!(m.set(1, 1, f32::INFINITY).is_err());
        m.set(1, 1, 2.5).unwrap();
        assert_eq!(m.iter_valid().collect::<Vec<_>>(), vec![(1, 1, 2.5)]);
    }

    #[test]
    fn crop_copies_window() {
        let vals: Vec<f64> = (1..=12).map(f64::from).collect();
        let m = DepthMap::from_values(4, 3, vals).unwrap();
        let c = m.crop(1, 1, 2, 2).unwrap();
        assert_eq!(c.values(), &[6.0, 7.0, 10.0, 11.0]);
        assert!(m.crop(3, 0, 2, 1).is_err());
    }

    #[test]
    fn image_rejects_out_of_range() {
        assert!(Image::<f32>::from_pixels(1, 1, vec![[0.5, 1.2, 0.0]]).is_err());
        assert!(Image::<f32>::from_pixels(1, 1, vec![[0.5, f32::NAN, 0.0]]).is_err());
    }

    #[test]
    fn luma_weights_sum_to_one() {
        assert!((luma([1.0f64, 1.0, 1.0]) - 1.0).abs() < 1e-15);
    }
}
