//! Virtual pattern projection: builds a fictitious, mutually coherent stereo
//! pair from a guide image and a sparse disparity map.
//!
//! Every valid disparity point writes a pattern sample into the reference view
//! at `(x, y)` and the same sample into the target view at `x - d(x, y)`.
//! Pixels without a sample stay black. Patches extend each point over a
//! square neighborhood that shares the point's disparity; in adaptive mode the
//! neighborhood is thresholded by a consistency weight against the guide image.
//!
//! Arbitration is sequential in row-major order of the sparse points and then
//! of the patch pixels, so a fixed seed gives bit-identical output:
//!
//! * reference, fixed patches: larger disparity wins, first writer on ties;
//! * reference, adaptive patches: larger consistency score wins, first writer on ties;
//! * target: larger disparity wins, first writer on ties; losers are discarded.

mod adaptive;
mod padding;
mod splat;

pub use adaptive::{adaptive_weights, consistency_weight, ScoreBuffer, WeightField};
pub use padding::{compute_left_padding, footprint_padding};
pub use splat::{Deposit, SplatOutcome, TargetCanvas};

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::raster::{DisparityMap, Image};
use crate::scalar::Real;

use adaptive::patch_bounds;

/// What is written at each projected point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum PatternMode {
    /// The guide image's own color.
    Rgb,
    /// An i.i.d. uniform random color per patterned pixel.
    #[default]
    Random,
}

impl fmt::Display for PatternMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PatternMode::Rgb => "rgb",
            PatternMode::Random => "random",
        })
    }
}

impl FromStr for PatternMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rgb" => Ok(PatternMode::Rgb),
            "random" => Ok(PatternMode::Random),
            other => Err(Error::Config(format!("unknown pattern mode `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PatternConfig<T> {
    pub mode: PatternMode,
    /// Odd side length of the square patch; 1 means point-wise.
    pub patch_size: usize,
    pub adaptive: bool,
    pub sigma_xy: T,
    pub sigma_i: T,
    pub t_adpt: T,
    pub left_padding: bool,
    pub rng_seed: u64,
}

impl<T: Real> Default for PatternConfig<T> {
    fn default() -> Self {
        Self {
            mode: PatternMode::Random,
            patch_size: 5,
            adaptive: true,
            sigma_xy: T::one(),
            sigma_i: T::one(),
            t_adpt: T::lit(0.001),
            left_padding: true,
            rng_seed: 0,
        }
    }
}

impl<T: Real> PatternConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.patch_size == 0 || self.patch_size.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "patch size must be odd and positive, got {}",
                self.patch_size
            )));
        }
        if !(self.sigma_xy > T::zero() && self.sigma_i > T::zero()) {
            return Err(Error::Config("sigma_xy and sigma_i must be positive".into()));
        }
        if !(self.t_adpt > T::zero() && self.t_adpt < T::one()) {
            return Err(Error::Config(format!(
                "t_adpt must lie in (0, 1), got {}",
                self.t_adpt
            )));
        }
        Ok(())
    }

    /// Adaptive shaping only applies to real patches.
    #[inline]
    pub fn uses_score_buffer(&self) -> bool {
        self.adaptive && self.patch_size > 1
    }
}

/// Counters reported alongside a projected pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ProjectionStats {
    /// Sparse points that seeded a pattern.
    pub points: usize,
    /// Patterned reference pixels.
    pub reference_pixels: usize,
    /// Reference samples whose every target tap fell off the image.
    pub dropped_warps: usize,
}

/// The fictitious stereo pair, both views widened by `pad_left` columns.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternedStereoPair<T> {
    pub reference: Image<T>,
    pub target: Image<T>,
    pub pad_left: usize,
    /// Disparity carried by each patterned reference pixel, in padded coordinates.
    pub reference_disparity: DisparityMap<T>,
    pub stats: ProjectionStats,
}

impl<T: Real> PatternedStereoPair<T> {
    pub fn width(&self) -> usize {
        self.reference.width()
    }

    pub fn height(&self) -> usize {
        self.reference.height()
    }

    /// Width before padding.
    pub fn original_width(&self) -> usize {
        self.width() - self.pad_left
    }
}

/// Guide-image colors projected coherently into both views.
pub fn project_rgb<T: Real>(
    image: &Image<T>,
    d: &DisparityMap<T>,
    cfg: &PatternConfig<T>,
) -> Result<PatternedStereoPair<T>> {
    project(image, d, &PatternConfig { mode: PatternMode::Rgb, ..*cfg })
}

/// Random colors projected coherently into both views.
pub fn project_random<T: Real>(
    image: &Image<T>,
    d: &DisparityMap<T>,
    cfg: &PatternConfig<T>,
) -> Result<PatternedStereoPair<T>> {
    project(image, d, &PatternConfig { mode: PatternMode::Random, ..*cfg })
}

fn random_color<T: Real>(rng: &mut ChaCha8Rng) -> [T; 3] {
    // (0, 0, 0) is reserved for the background
    loop {
        let c: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
        let c = c.map(T::lit);
        if c.iter().any(|v| !v.is_zero()) {
            return c;
        }
    }
}

/// Build the patterned pair according to `cfg.mode`.
pub fn project<T: Real>(
    image: &Image<T>,
    d: &DisparityMap<T>,
    cfg: &PatternConfig<T>,
) -> Result<PatternedStereoPair<T>> {
    cfg.validate()?;
    let (w, h) = (image.width(), image.height());
    if d.width() != w || d.height() != h {
        return Err(Error::Config(format!(
            "guide image is {w}x{h} but disparity map is {}x{}",
            d.width(),
            d.height()
        )));
    }
    let pad = if cfg.left_padding {
        footprint_padding(d, cfg.patch_size)
    } else {
        0
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut color_at = |x: usize, y: usize| -> [T; 3] {
        match cfg.mode {
            PatternMode::Rgb => image.get(x, y),
            PatternMode::Random => random_color(&mut rng),
        }
    };

    // Reference-side assignment in unpadded coordinates: (color, disparity).
    let mut assigned: Vec<Option<([T; 3], T)>> = vec![None; w * h];
    let mut points = 0;
    if cfg.patch_size == 1 {
        for (x, y, disp) in d.iter_valid() {
            points += 1;
            assigned[y * w + x] = Some((color_at(x, y), disp));
        }
    } else if cfg.adaptive {
        let mut scores = ScoreBuffer::new(w, h);
        for (x, y, disp) in d.iter_valid() {
            points += 1;
            let field = adaptive_weights(image, x, y, cfg.patch_size, cfg.sigma_xy, cfg.sigma_i);
            for (px, py, score) in field.eligible(cfg.t_adpt) {
                let c = color_at(px, py);
                scores.insert(px, py, score, c, disp);
            }
        }
        for y in 0..h {
            for x in 0..w {
                assigned[y * w + x] = scores.winner(x, y);
            }
        }
    } else {
        for (x, y, disp) in d.iter_valid() {
            points += 1;
            let (x0, y0, x1, y1) = patch_bounds(x, y, cfg.patch_size, w, h);
            for py in y0..=y1 {
                for px in x0..=x1 {
                    let c = color_at(px, py);
                    let slot = &mut assigned[py * w + px];
                    if slot.is_none_or(|(_, prev)| disp > prev) {
                        *slot = Some((c, disp));
                    }
                }
            }
        }
    }

    let wp = w + pad;
    let mut reference = Image::black(wp, h);
    let mut reference_disparity = DisparityMap::new(wp, h);
    let mut canvas = TargetCanvas::new(wp, h);
    let mut reference_pixels = 0;
    for y in 0..h {
        for x in 0..w {
            let Some((c, disp)) = assigned[y * w + x] else {
                continue;
            };
            let xp = x + pad;
            reference.put(xp, y, c);
            reference_disparity.set(xp, y, disp)?;
            reference_pixels += 1;
            canvas.splat(T::from_usize(xp).unwrap() - disp, y, c, disp);
        }
    }

    Ok(PatternedStereoPair {
        reference,
        target: canvas.resolve(),
        pad_left: pad,
        reference_disparity,
        stats: ProjectionStats {
            points,
            reference_pixels,
            dropped_warps: canvas.dropped(),
        },
    })
}

/// Remove the `pad_left` leading columns of a matcher output computed on a
/// padded pair of original width `width`.
pub fn crop_output<T: Real>(
    dense: &DisparityMap<T>,
    pad_left: usize,
    width: usize,
) -> Result<DisparityMap<T>> {
    if dense.width() != width + pad_left {
        return Err(Error::Matcher(format!(
            "disparity width {} does not match padded width {} + {}",
            dense.width(),
            width,
            pad_left
        )));
    }
    dense.crop(pad_left, 0, width, dense.height())
}
