use crate::dataset::Sample;
use crate::error::{Result, StageExt};
use crate::eval::metrics::{evaluate, InvalidPolicy, Metrics};
use crate::geometry::{depth_to_disparity, disparity_to_depth, VirtualRig};
use crate::pattern::{crop_output, project, PatternConfig, PatternedStereoPair};
use crate::raster::{DepthMap, DisparityMap};
use crate::scalar::Real;
use crate::sgm::{MatchContext, StereoMatcher};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineConfig<T> {
    pub rig: VirtualRig<T>,
    pub pattern: PatternConfig<T>,
    pub policy: InvalidPolicy,
}

/// Everything the pipeline computed on the way to the dense depth.
#[derive(Clone, Debug)]
pub struct Intermediates<T> {
    pub sparse_disparity: DisparityMap<T>,
    pub pair: PatternedStereoPair<T>,
    /// Matcher output on the padded pair.
    pub raw_disparity: DisparityMap<T>,
    pub disparity: DisparityMap<T>,
}

#[derive(Clone, Debug)]
pub struct Completion<T> {
    pub depth: DepthMap<T>,
    pub metrics: Metrics,
    pub intermediates: Option<Intermediates<T>>,
}

/// Densify one sample. `seed` drives the random pattern (it replaces
/// `cfg.pattern.rng_seed`) and is passed on to the matcher.
///
/// The sparse map of the sample is taken to be registered to the guide image
/// already; raw point clouds go through [`crate::geometry::project_points`] first.
pub fn complete<T: Real, M: StereoMatcher<T> + ?Sized>(
    sample: &Sample<T>,
    cfg: &PipelineConfig<T>,
    matcher: &M,
    seed: u64,
    keep_intermediates: bool,
) -> Result<Completion<T>> {
    cfg.rig.validate().stage("configure")?;
    let (w, h) = (sample.width(), sample.height());
    if cfg.rig.camera.width != w || cfg.rig.camera.height != h {
        return Err(crate::error::Error::Config(format!(
            "camera is {}x{} but sample `{}` is {w}x{h}",
            cfg.rig.camera.width, cfg.rig.camera.height, sample.id
        )))
        .stage("configure");
    }
    let sparse_disparity = depth_to_disparity(&sample.sparse, &cfg.rig).stage("disparity")?;
    let pattern = PatternConfig {
        rng_seed: seed,
        ..cfg.pattern
    };
    let pair = project(&sample.rgb, &sparse_disparity, &pattern).stage("pattern")?;
    let ctx = MatchContext {
        id: &sample.id,
        rig: &cfg.rig,
        seed,
        gt: sample.gt.valid_count().gt(&0).then_some(&sample.gt),
    };
    let raw_disparity = matcher.compute(&pair, &ctx).stage("match")?;
    let disparity = crop_output(&raw_disparity, pair.pad_left, w).stage("crop")?;
    let depth = disparity_to_depth(&disparity, &cfg.rig).stage("triangulate")?;
    let mut metrics = evaluate(&depth, &sample.gt, cfg.policy).stage("evaluate")?;
    metrics.dropped_warps = pair.stats.dropped_warps;
    let intermediates = keep_intermediates.then_some(Intermediates {
        sparse_disparity,
        pair,
        raw_disparity,
        disparity,
    });
    Ok(Completion {
        depth,
        metrics,
        intermediates,
    })
}
