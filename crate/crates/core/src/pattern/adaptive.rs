//! Image-guided patch shapes: a bilateral-style consistency weight between each
//! patch pixel and the patch center, and the score buffer that arbitrates
//! overlapping patches.

use crate::raster::Image;
use crate::scalar::Real;

/// `exp(-((dx² + dy²) / 2σxy² + Δi² / 2σi²))`.
#[inline]
pub fn consistency_weight<T: Real>(dx: T, dy: T, delta_i: T, sigma_xy: T, sigma_i: T) -> T {
    let two = T::lit(2.0);
    let spatial = (dx * dx + dy * dy) / (two * sigma_xy * sigma_xy);
    let range = delta_i * delta_i / (two * sigma_i * sigma_i);
    (-(spatial + range)).exp()
}

/// Weights over the (border-clipped) patch around a center pixel.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightField<T> {
    /// Top-left corner of the clipped patch in image coordinates.
    pub x0: usize,
    pub y0: usize,
    pub width: usize,
    pub height: usize,
    /// Row-major weights.
    pub weights: Vec<T>,
}

impl<T: Real> WeightField<T> {
    #[inline]
    pub fn weight(&self, x: usize, y: usize) -> T {
        self.weights[(y - self.y0) * self.width + (x - self.x0)]
    }

    /// `(x, y, w)` for every pixel whose weight exceeds `threshold`, row-major.
    pub fn eligible(&self, threshold: T) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .filter(move |(_, &w)| w > threshold)
            .map(move |(i, &w)| (self.x0 + i % self.width, self.y0 + i / self.width, w))
    }
}

/// Clipped square window of odd `size` centered at `(x, y)`.
pub(crate) fn patch_bounds(x: usize, y: usize, size: usize, width: usize, height: usize) -> (usize, usize, usize, usize) {
    let r = size / 2;
    let x0 = x.saturating_sub(r);
    let y0 = y.saturating_sub(r);
    let x1 = (x + r).min(width - 1);
    let y1 = (y + r).min(height - 1);
    (x0, y0, x1, y1)
}

/// Consistency weights of the `patch_size` window around `(x, y)` against the
/// center, with intensity differences measured on luma.
pub fn adaptive_weights<T: Real>(
    image: &Image<T>,
    x: usize,
    y: usize,
    patch_size: usize,
    sigma_xy: T,
    sigma_i: T,
) -> WeightField<T> {
    let (x0, y0, x1, y1) = patch_bounds(x, y, patch_size, image.width(), image.height());
    let center = image.luma(x, y);
    let mut weights = Vec::with_capacity((x1 - x0 + 1) * (y1 - y0 + 1));
    for py in y0..=y1 {
        for px in x0..=x1 {
            let dx = T::from_usize(px).unwrap() - T::from_usize(x).unwrap();
            let dy = T::from_usize(py).unwrap() - T::from_usize(y).unwrap();
            let di = image.luma(px, py) - center;
            weights.push(consistency_weight(dx, dy, di, sigma_xy, sigma_i));
        }
    }
    WeightField {
        x0,
        y0,
        width: x1 - x0 + 1,
        height: y1 - y0 + 1,
        weights,
    }
}

/// Image-sized record of the best consistency score seen per pixel, with the
/// pattern sample that achieved it. Scores start at zero and only increase.
#[derive(Clone, Debug)]
pub struct ScoreBuffer<T> {
    width: usize,
    height: usize,
    scores: Vec<T>,
    colors: Vec<[T; 3]>,
    disparities: Vec<T>,
}

impl<T: Real> ScoreBuffer<T> {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            scores: vec![T::zero(); width * height],
            colors: vec![[T::zero(); 3]; width * height],
            disparities: vec![T::zero(); width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Keep the candidate if its score is strictly higher than the stored one;
    /// on ties the earlier insertion stays.
    pub fn insert(&mut self, x: usize, y: usize, score: T, color: [T; 3], disparity: T) -> bool {
        let i = y * self.width + x;
        if score > self.scores[i] {
            self.scores[i] = score;
            self.colors[i] = color;
            self.disparities[i] = disparity;
            true
        } else {
            false
        }
    }

    pub fn score(&self, x: usize, y: usize) -> T {
        self.scores[y * self.width + x]
    }

    /// Winning `(color, disparity)` if anything was inserted.
    pub fn winner(&self, x: usize, y: usize) -> Option<([T; 3], T)> {
        let i = y * self.width + x;
        (self.scores[i] > T::zero()).then(|| (self.colors[i], self.disparities[i]))
    }
}
