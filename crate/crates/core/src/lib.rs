//! Depth completion by virtual pattern projection.
//!
//! Sparse depth is converted to disparity for a fictitious stereo rig, painted
//! into a coherent patterned image pair, matched by any stereo matcher and
//! triangulated back to dense depth.
//!
//! Numeric code is generic over [`scalar::Real`] (`f32` or `f64`); the aliases
//! below fix the scalar for the common cases. File-facing code and the CLI use
//! `f32`, the native PFM sample type.

pub mod calib;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod pattern;
pub mod raster;
pub mod scalar;
pub mod seed;
pub mod sgm;

pub use error::{Error, Result};
pub use scalar::Real;

pub type CameraModelF32 = geometry::CameraModel<f32>;
pub type CameraModelF64 = geometry::CameraModel<f64>;
pub type RigidTransformF32 = geometry::RigidTransform<f32>;
pub type RigidTransformF64 = geometry::RigidTransform<f64>;
pub type VirtualRigF32 = geometry::VirtualRig<f32>;
pub type VirtualRigF64 = geometry::VirtualRig<f64>;
pub type PointCloudF32 = geometry::PointCloud<f32>;
pub type PointCloudF64 = geometry::PointCloud<f64>;
pub type DepthMapF32 = raster::DepthMap<f32>;
pub type DepthMapF64 = raster::DepthMap<f64>;
pub type DisparityMapF32 = raster::DisparityMap<f32>;
pub type DisparityMapF64 = raster::DisparityMap<f64>;
pub type ImageF32 = raster::Image<f32>;
pub type ImageF64 = raster::Image<f64>;
pub type PatternConfigF32 = pattern::PatternConfig<f32>;
pub type PatternConfigF64 = pattern::PatternConfig<f64>;
pub type PatternedStereoPairF32 = pattern::PatternedStereoPair<f32>;
pub type PatternedStereoPairF64 = pattern::PatternedStereoPair<f64>;
pub type SampleF32 = dataset::Sample<f32>;
pub type SampleF64 = dataset::Sample<f64>;
pub type CalibrationF32 = calib::Calibration<f32>;
pub type CalibrationF64 = calib::Calibration<f64>;
