//! Two-tap horizontal splatting into the target view with foreground arbitration.

use crate::raster::Image;
use crate::scalar::Real;

/// Winning contribution held by a target pixel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Deposit<T> {
    pub disparity: T,
    pub weight: T,
    pub color: [T; 3],
    /// Insertion index of the source that wrote it.
    pub source: usize,
}

/// Result of one [`TargetCanvas::splat`] call.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SplatOutcome<T> {
    /// `(x, weight)` for each in-image tap with non-zero weight.
    pub taps: [Option<(usize, T)>; 2],
    /// Taps that were stored (beat or filled the pixel).
    pub written: usize,
    /// True when every non-zero tap fell outside the image.
    pub dropped: bool,
}

/// Target image under construction, with a per-pixel disparity z-buffer.
#[derive(Clone, Debug)]
pub struct TargetCanvas<T> {
    width: usize,
    height: usize,
    cells: Vec<Option<Deposit<T>>>,
    sources: usize,
    dropped: usize,
}

impl<T: Real> TargetCanvas<T> {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            cells: vec![None; width * height],
            sources: 0,
            dropped: 0,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn deposit(&self, x: usize, y: usize) -> Option<Deposit<T>> {
        self.cells[y * self.width + x]
    }

    /// Contributions lost entirely off the image edges.
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    /// Deposit `color` at continuous column `x_cont` on row `y`.
    ///
    /// The taps are `floor(x_cont)` with weight `1 - frac` and `floor(x_cont) + 1`
    /// with weight `frac`; zero-weight taps are skipped. A tap replaces the stored
    /// deposit only with a strictly larger disparity, so the first writer wins ties.
    pub fn splat(&mut self, x_cont: T, y: usize, color: [T; 3], disparity: T) -> SplatOutcome<T> {
        let source = self.sources;
        self.sources += 1;
        let base = x_cont.floor();
        let frac = x_cont - base;
        let mut out = SplatOutcome::default();
        let mut any_weight = false;
        for (k, (offset, weight)) in [(T::zero(), T::one() - frac), (T::one(), frac)]
            .into_iter()
            .enumerate()
        {
            if weight <= T::zero() {
                continue;
            }
            any_weight = true;
            let xt = base + offset;
            if xt < T::zero() || xt >= T::from_usize(self.width).unwrap() {
                continue;
            }
            let xt = xt.to_usize().unwrap();
            out.taps[k] = Some((xt, weight));
            let cell = &mut self.cells[y * self.width + xt];
            let wins = cell.is_none_or(|d| disparity > d.disparity);
            if wins {
                *cell = Some(Deposit {
                    disparity,
                    weight,
                    color,
                    source,
                });
                out.written += 1;
            }
        }
        if any_weight && out.taps.iter().all(Option::is_none) {
            out.dropped = true;
            self.dropped += 1;
        }
        out
    }

    /// Final target image: each pixel holds its winner's color scaled by the
    /// tap weight over the black background.
    pub fn resolve(&self) -> Image<T> {
        let mut img = Image::black(self.width, self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                if let Some(d) = self.cells[y * self.width + x] {
                    let c = if d.weight == T::one() {
                        d.color
                    } else {
                        d.color.map(|v| v * d.weight)
                    };
                    img.put(x, y, c);
                }
            }
        }
        img
    }
}
