//! Census / Semi-Global Matching and the matcher boundary.

pub mod aggregate;
pub mod census;
pub mod cost;
pub mod external;
pub mod wta;

pub use aggregate::{aggregate_direction, aggregate_paths, Penalties, PATHS_8};
pub use census::{census_transform, CensusImage, MAX_CENSUS_WINDOW};
pub use cost::{matching_cost, CostVolume};
pub use external::{ExternalMatcher, Sidecar};
pub use wta::{wta_disparity, WtaOptions};

use crate::error::{Error, Result};
use crate::geometry::VirtualRig;
use crate::pattern::PatternedStereoPair;
use crate::raster::{DepthMap, DisparityMap, Image};
use crate::scalar::Real;

/// Per-call information a matcher may use besides the images.
#[derive(Clone, Copy, Debug)]
pub struct MatchContext<'a, T> {
    pub id: &'a str,
    pub rig: &'a VirtualRig<T>,
    pub seed: u64,
    /// Ground-truth depth of the sample, when known.
    pub gt: Option<&'a DepthMap<T>>,
}

/// Anything that turns a patterned pair into a reference-view disparity map of
/// the padded pair's size.
pub trait StereoMatcher<T: Real>: Sync {
    fn compute(&self, pair: &PatternedStereoPair<T>, ctx: &MatchContext<'_, T>) -> Result<DisparityMap<T>>;

    fn name(&self) -> String;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatcherConfig {
    /// Number of disparity levels; `None` sizes the range from the sparse input.
    pub max_disparity: Option<usize>,
    pub census_window: usize,
    /// Penalties; `None` scales 8 / 32 (5x5 window) by the census bit count.
    pub p1: Option<u32>,
    pub p2: Option<u32>,
    pub num_paths: usize,
    pub subpixel: bool,
    pub lr_threshold: Option<f64>,
}

impl Default for MatcherConfig {
    fn default() -> Self {
        Self {
            max_disparity: None,
            census_window: 5,
            p1: None,
            p2: None,
            num_paths: 8,
            subpixel: false,
            lr_threshold: None,
        }
    }
}

impl MatcherConfig {
    pub fn validate(&self) -> Result<()> {
        census::check_window(self.census_window)?;
        if !matches!(self.num_paths, 4 | 8) {
            return Err(Error::Config(format!("path count must be 4 or 8, got {}", self.num_paths)));
        }
        if self.max_disparity == Some(0) {
            return Err(Error::Config("disparity range must be positive".into()));
        }
        let pen = self.penalties();
        if pen.p2 <= pen.p1 {
            return Err(Error::Config(format!("P2 ({}) must exceed P1 ({})", pen.p2, pen.p1)));
        }
        if let Some(t) = self.lr_threshold {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("left-right threshold must be non-negative, got {t}")));
            }
        }
        Ok(())
    }

    pub fn penalties(&self) -> Penalties {
        let bits = (self.census_window * self.census_window - 1) as f64;
        Penalties {
            p1: self.p1.unwrap_or((8.0 * bits / 24.0).round() as u32),
            p2: self.p2.unwrap_or((32.0 * bits / 24.0).round() as u32),
        }
    }

    /// Disparity levels: the configured count, or 1.2 times the largest
    /// expected disparity rounded up to a multiple of 16.
    pub fn levels_for_max(&self, max_expected: Option<f64>) -> usize {
        self.max_disparity.unwrap_or_else(|| {
            let levels = (1.2 * max_expected.unwrap_or(0.0)).ceil().max(1.0) as usize;
            levels.div_ceil(16) * 16
        })
    }

    /// Levels sized from the disparities projected into `pair`.
    pub fn levels_for<T: Real>(&self, pair: &PatternedStereoPair<T>) -> usize {
        self.levels_for_max(pair.reference_disparity.max_valid().map(|d| d.as_f64()))
    }
}

/// In-process census + SGM matcher.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SgmMatcher {
    pub config: MatcherConfig,
}

impl SgmMatcher {
    pub fn new(config: MatcherConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { config })
    }

    pub fn match_pair<T: Real>(&self, pair: &PatternedStereoPair<T>) -> Result<DisparityMap<T>> {
        self.match_images(&pair.reference, &pair.target, self.config.levels_for(pair))
    }

    /// Reference-view disparity over `levels` candidates `0..levels`.
    pub fn match_images<T: Real>(
        &self,
        reference: &Image<T>,
        target: &Image<T>,
        levels: usize,
    ) -> Result<DisparityMap<T>> {
        let cfg = &self.config;
        cfg.validate()?;
        let (w, h) = (reference.width(), reference.height());
        if target.width() != w || target.height() != h {
            return Err(Error::Input(format!(
                "reference is {w}x{h} but target is {}x{}",
                target.width(),
                target.height()
            )));
        }
        let left = census_transform(&reference.luma_plane(), w, h, cfg.census_window)?;
        let right = census_transform(&target.luma_plane(), w, h, cfg.census_window)?;
        let cv = matching_cost(&left, &right, levels)?;
        let sum = aggregate_paths(&cv, cfg.num_paths, cfg.penalties());
        Ok(wta_disparity(
            &sum,
            WtaOptions {
                subpixel: cfg.subpixel,
                lr_threshold: cfg.lr_threshold,
            },
        ))
    }
}

impl<T: Real> StereoMatcher<T> for SgmMatcher {
    fn compute(&self, pair: &PatternedStereoPair<T>, _ctx: &MatchContext<'_, T>) -> Result<DisparityMap<T>> {
        self.match_pair(pair)
    }

    fn name(&self) -> String {
        "sgm".into()
    }
}
