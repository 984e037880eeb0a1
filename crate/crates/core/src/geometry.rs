//! Camera model, sensor-to-camera transform and the virtual horizontal rig.

use crate::error::{Error, Result};
use crate::raster::{DepthMap, DisparityMap};
use crate::scalar::Real;

/// Disparities at or below this value (pixels) triangulate to an invalid depth.
pub const DISPARITY_EPSILON: f64 = 1e-3;

/// Pinhole intrinsics and image size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CameraModel<T> {
    pub fx: T,
    pub fy: T,
    pub cx: T,
    pub cy: T,
    pub width: usize,
    pub height: usize,
}

impl<T: Real> CameraModel<T> {
    pub fn new(fx: T, fy: T, cx: T, cy: T, width: usize, height: usize) -> Result<Self> {
        let cam = Self {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
        };
        cam.validate()?;
        Ok(cam)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fx > T::zero() && self.fy > T::zero()) || !self.fx.is_finite() || !self.fy.is_finite() {
            return Err(Error::Config(format!(
                "focal lengths must be positive, got fx={} fy={}",
                self.fx, self.fy
            )));
        }
        let w = T::from_usize(self.width).unwrap_or_else(T::zero);
        let h = T::from_usize(self.height).unwrap_or_else(T::zero);
        if !(self.cx >= T::zero() && self.cx < w && self.cy >= T::zero() && self.cy < h) {
            return Err(Error::Config(format!(
                "principal point ({}, {}) outside {}x{} image",
                self.cx, self.cy, self.width, self.height
            )));
        }
        Ok(())
    }

    pub fn cast<S: Real>(&self) -> CameraModel<S> {
        CameraModel {
            fx: S::lit(self.fx.as_f64()),
            fy: S::lit(self.fy.as_f64()),
            cx: S::lit(self.cx.as_f64()),
            cy: S::lit(self.cy.as_f64()),
            width: self.width,
            height: self.height,
        }
    }
}

/// Rotation plus translation taking depth-sensor coordinates into the camera frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigidTransform<T> {
    pub rotation: [[T; 3]; 3],
    pub translation: [T; 3],
}

impl<T: Real> RigidTransform<T> {
    pub fn identity() -> Self {
        let (o, z) = (T::one(), T::zero());
        Self {
            rotation: [[o, z, z], [z, o, z], [z, z, o]],
            translation: [z; 3],
        }
    }

    pub fn new(rotation: [[T; 3]; 3], translation: [T; 3]) -> Result<Self> {
        let t = Self {
            rotation,
            translation,
        };
        t.validate()?;
        Ok(t)
    }

    /// Row-major 3x4 `[R | t]`.
    pub fn from_row_major(m: &[T; 12]) -> Result<Self> {
        Self::new(
            [
                [m[0], m[1], m[2]],
                [m[4], m[5], m[6]],
                [m[8], m[9], m[10]],
            ],
            [m[3], m[7], m[11]],
        )
    }

    pub fn to_row_major(&self) -> [T; 12] {
        let r = &self.rotation;
        let t = &self.translation;
        [
            r[0][0], r[0][1], r[0][2], t[0], r[1][0], r[1][1], r[1][2], t[1], r[2][0], r[2][1],
            r[2][2], t[2],
        ]
    }

    /// Checks `RᵀR = I` and `det R = +1`.
    pub fn validate(&self) -> Result<()> {
        let r = &self.rotation;
        let tol = T::rotation_tolerance();
        if r.iter().flatten().chain(&self.translation).any(|v| !v.is_finite()) {
            return Err(Error::Config("transform has non-finite entries".into()));
        }
        for i in 0..3 {
            for j in 0..3 {
                let dot = (0..3).fold(T::zero(), |acc, k| acc + r[k][i] * r[k][j]);
                let expect = if i == j { T::one() } else { T::zero() };
                if (dot - expect).abs() > tol {
                    return Err(Error::Config(format!(
                        "rotation is not orthonormal: (RᵀR)[{i}][{j}] = {dot}"
                    )));
                }
            }
        }
        let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
            - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
        if (det - T::one()).abs() > tol {
            return Err(Error::Config(format!("rotation determinant is {det}, expected +1")));
        }
        Ok(())
    }

    #[inline]
    pub fn apply(&self, p: [T; 3]) -> [T; 3] {
        let r = &self.rotation;
        let t = &self.translation;
        [
            r[0][0] * p[0] + r[0][1] * p[1] + r[0][2] * p[2] + t[0],
            r[1][0] * p[0] + r[1][1] * p[1] + r[1][2] * p[2] + t[1],
            r[2][0] * p[0] + r[2][1] * p[1] + r[2][2] * p[2] + t[2],
        ]
    }
}

/// Two fictitious cameras sharing the intrinsics of the real one, the target
/// shifted right by `baseline` meters along the x axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VirtualRig<T> {
    pub camera: CameraModel<T>,
    pub baseline: T,
}

impl<T: Real> VirtualRig<T> {
    pub fn new(camera: CameraModel<T>, baseline: T) -> Result<Self> {
        let rig = Self { camera, baseline };
        rig.validate()?;
        Ok(rig)
    }

    pub fn validate(&self) -> Result<()> {
        self.camera.validate()?;
        if !(self.baseline > T::zero() && self.baseline.is_finite()) {
            return Err(Error::Config(format!(
                "virtual baseline must be positive, got {}",
                self.baseline
            )));
        }
        Ok(())
    }

    /// Focal length entering the disparity relation (horizontal rig, so `fx`).
    #[inline]
    pub fn focal(&self) -> T {
        self.camera.fx
    }

    #[inline]
    pub fn with_baseline(&self, baseline: T) -> Result<Self> {
        Self::new(self.camera, baseline)
    }

    #[inline]
    pub fn depth_to_disparity_value(&self, z: T) -> T {
        self.baseline * self.focal() / z
    }

    #[inline]
    pub fn disparity_to_depth_value(&self, d: T) -> T {
        self.baseline * self.focal() / d
    }
}

/// 3D points in the depth-sensor frame, meters.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointCloud<T> {
    points: Vec<[T; 3]>,
}

impl<T: Real> PointCloud<T> {
    pub fn new(points: Vec<[T; 3]>) -> Result<Self> {
        if let Some(i) = points.iter().position(|p| p.iter().any(|v| !v.is_finite())) {
            return Err(Error::Input(format!("point {i} is not finite")));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[[T; 3]] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Counters for points that did not reach the depth map.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ProjectionStats {
    pub behind_camera: usize,
    pub outside_image: usize,
    /// Points that lost the per-pixel nearest-depth test.
    pub occluded: usize,
}

/// Rasterize a sensor point cloud into the camera's sparse depth map.
pub fn project_points<T: Real>(
    cloud: &PointCloud<T>,
    cam: &CameraModel<T>,
    xform: &RigidTransform<T>,
) -> Result<DepthMap<T>> {
    project_points_with_stats(cloud, cam, xform).map(|(m, _)| m)
}

/// As [`project_points`], also returning drop counters.
///
/// Projected positions are rounded to the nearest pixel center; when several
/// points land on one pixel the nearest depth is kept.
pub fn project_points_with_stats<T: Real>(
    cloud: &PointCloud<T>,
    cam: &CameraModel<T>,
    xform: &RigidTransform<T>,
) -> Result<(DepthMap<T>, ProjectionStats)> {
    cam.validate()?;
    xform.validate()?;
    let mut map = DepthMap::new(cam.width, cam.height);
    let mut stats = ProjectionStats::default();
    let w = T::from_usize(cam.width).unwrap_or_else(T::zero);
    let h = T::from_usize(cam.height).unwrap_or_else(T::zero);
    for &p in cloud.points() {
        let [x, y, z] = xform.apply(p);
        if !(z > T::zero()) {
            stats.behind_camera += 1;
            continue;
        }
        let u = (cam.fx * x / z + cam.cx).round();
        let v = (cam.fy * y / z + cam.cy).round();
        if !(u >= T::zero() && u < w && v >= T::zero() && v < h) {
            stats.outside_image += 1;
            continue;
        }
        let (px, py) = (u.to_usize().unwrap_or(0), v.to_usize().unwrap_or(0));
        match map.get(px, py) {
            Some(prev) if prev <= z => stats.occluded += 1,
            Some(_) => {
                stats.occluded += 1;
                map.set(px, py, z)?;
            }
            None => map.set(px, py, z)?,
        }
    }
    Ok((map, stats))
}

/// `d = b·f / z` on every valid pixel.
pub fn depth_to_disparity<T: Real>(z: &DepthMap<T>, rig: &VirtualRig<T>) -> Result<DisparityMap<T>> {
    rig.validate()?;
    let mut out = DisparityMap::new(z.width(), z.height());
    for (x, y, depth) in z.iter_valid() {
        let d = rig.depth_to_disparity_value(depth);
        out.set(x, y, d).map_err(|_| {
            Error::Input(format!("depth {depth} at ({x},{y}) has no finite positive disparity"))
        })?;
    }
    Ok(out)
}

/// `z = b·f / d`; disparities at or below [`DISPARITY_EPSILON`] become invalid.
pub fn disparity_to_depth<T: Real>(d: &DisparityMap<T>, rig: &VirtualRig<T>) -> Result<DepthMap<T>> {
    rig.validate()?;
    let eps = T::lit(DISPARITY_EPSILON);
    let mut out = DepthMap::new(d.width(), d.height());
    for (x, y, disp) in d.iter_valid() {
        if disp <= eps {
            continue;
        }
        let z = rig.disparity_to_depth_value(disp);
        if z.is_finite() && z > T::zero() {
            out.set(x, y, z)?;
        }
    }
    Ok(out)
}
