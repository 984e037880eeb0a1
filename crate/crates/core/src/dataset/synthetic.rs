//! Desk-scale synthetic scenes: a slanted background plane with fronto-parallel
//! rectangles in front of it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{subsample_points, Sample};
use crate::error::{Error, Result};
use crate::geometry::{CameraModel, VirtualRig};
use crate::raster::{DepthMap, Image};
use crate::scalar::Real;
use crate::seed::derive_seed;

/// Plane `normal · X = offset` in camera coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Plane<T> {
    pub normal: [T; 3],
    pub offset: T,
}

impl<T: Real> Plane<T> {
    /// Depth where the ray through pixel `(u, v)` meets the plane.
    pub fn depth_at(&self, cam: &CameraModel<T>, u: T, v: T) -> T {
        let ray = [(u - cam.cx) / cam.fx, (v - cam.cy) / cam.fy, T::one()];
        let dot = self.normal[0] * ray[0] + self.normal[1] * ray[1] + self.normal[2] * ray[2];
        self.offset / dot
    }
}

/// Fronto-parallel rectangle covering pixels `[x0, x1) x [y0, y1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Layer<T> {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
    pub depth: T,
    pub color: [T; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticScene<T> {
    pub z_min: T,
    pub z_max: T,
    pub background: Plane<T>,
    pub background_color: [T; 3],
    /// Ordered far to near; nearer layers paint over farther ones.
    pub layers: Vec<Layer<T>>,
    pub texture_seed: u64,
}

impl<T: Real> SyntheticScene<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.z_min > T::zero() && self.z_max > self.z_min) {
            return Err(Error::Config(format!(
                "depth range [{}, {}] must be positive and non-empty",
                self.z_min, self.z_max
            )));
        }
        for (i, l) in self.layers.iter().enumerate() {
            if !(l.depth >= self.z_min && l.depth <= self.z_max) {
                return Err(Error::Config(format!("layer {i} depth {} outside range", l.depth)));
            }
            if l.x0 >= l.x1 || l.y0 >= l.y1 {
                return Err(Error::Config(format!("layer {i} has an empty rectangle")));
            }
            if i > 0 && l.depth > self.layers[i - 1].depth {
                return Err(Error::Config("layers must be ordered far to near".into()));
            }
        }
        Ok(())
    }

    /// Random indoor-like scene for `cam`: background plane in the far half of
    /// the range, two or three rectangles in the near half.
    pub fn random(cam: &CameraModel<T>, z_min: f64, z_max: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (w, h) = (cam.width as f64, cam.height as f64);
        let fx = cam.fx.as_f64();
        let fy = cam.fy.as_f64();
        let span = z_max - z_min;

        // inverse depth is affine in pixel coordinates for any plane
        let z_center = rng.gen_range(z_min + 0.55 * span..z_min + 0.7 * span);
        let alpha = 1.0 / z_center;
        let beta = rng.gen_range(-0.2..0.2) * alpha / w;
        let gamma = rng.gen_range(-0.2..0.2) * alpha / h;
        let background = Plane {
            normal: [T::lit(beta * fx), T::lit(gamma * fy), T::lit(alpha)],
            offset: T::one(),
        };

        let n_layers = rng.gen_range(2..=3);
        let mut depths: Vec<f64> = (0..n_layers)
            .map(|_| rng.gen_range(z_min..z_min + 0.45 * span))
            .collect();
        depths.sort_by(|a, b| b.total_cmp(a));
        let layers = depths
            .into_iter()
            .map(|depth| {
                let lw = rng.gen_range(0.12..0.35) * w;
                let lh = rng.gen_range(0.15..0.4) * h;
                let x0 = rng.gen_range(0.0..w - lw) as usize;
                let y0 = rng.gen_range(0.0..h - lh) as usize;
                Layer {
                    x0,
                    y0,
                    x1: x0 + lw as usize,
                    y1: y0 + lh as usize,
                    depth: T::lit(depth),
                    color: random_color(&mut rng),
                }
            })
            .collect();
        let scene = Self {
            z_min: T::lit(z_min),
            z_max: T::lit(z_max),
            background,
            background_color: random_color(&mut rng),
            layers,
            texture_seed: rng.gen(),
        };
        scene.validate()?;
        Ok(scene)
    }
}

fn random_color<T: Real>(rng: &mut ChaCha8Rng) -> [T; 3] {
    [(); 3].map(|_| T::lit(rng.gen_range(0.2..0.8)))
}

/// Rasterize the scene: dense ground-truth depth plus a textured guide image.
/// The sparse input of the returned sample is the full dense depth; draw
/// sparse points from it with [`crate::dataset::subsample_points`].
pub fn render_synthetic<T: Real>(scene: &SyntheticScene<T>, cam: &CameraModel<T>) -> Result<Sample<T>> {
    scene.validate()?;
    cam.validate()?;
    let (w, h) = (cam.width, cam.height);
    let mut gt = DepthMap::new(w, h);
    let mut pixels = Vec::with_capacity(w * h);
    let mut rng = ChaCha8Rng::seed_from_u64(scene.texture_seed);
    for y in 0..h {
        for x in 0..w {
            let (u, v) = (T::from_usize(x).unwrap(), T::from_usize(y).unwrap());
            let mut depth = scene.background.depth_at(cam, u, v);
            let mut base = scene.background_color;
            for l in &scene.layers {
                if x >= l.x0 && x < l.x1 && y >= l.y0 && y < l.y1 {
                    depth = l.depth;
                    base = l.color;
                }
            }
            if !(depth >= scene.z_min && depth <= scene.z_max) {
                return Err(Error::Config(format!(
                    "background depth {depth} at ({x},{y}) outside [{}, {}]",
                    scene.z_min, scene.z_max
                )));
            }
            gt.set(x, y, depth)?;
            let noise: f64 = rng.gen_range(-0.18..0.18);
            pixels.push(base.map(|c| (c + T::lit(noise)).max(T::zero()).min(T::one())));
        }
    }
    let rgb = Image::from_pixels(w, h, pixels)?;
    Sample::new(String::new(), rgb, gt.clone(), gt)
}

/// Move every depth to a fixed point of the rig's depth → disparity → depth
/// round trip, so triangulating the stored disparity reproduces it bit for bit.
pub fn snap_to_rig<T: Real>(z: &DepthMap<T>, rig: &VirtualRig<T>) -> Result<DepthMap<T>> {
    rig.validate()?;
    let mut out = DepthMap::new(z.width(), z.height());
    for (x, y, mut depth) in z.iter_valid() {
        // the round trip is monotone, so iteration settles within a few ulps
        for _ in 0..64 {
            let next = rig.disparity_to_depth_value(rig.depth_to_disparity_value(depth));
            if next == depth {
                break;
            }
            depth = next;
        }
        if rig.disparity_to_depth_value(rig.depth_to_disparity_value(depth)) != depth {
            return Err(Error::Input(format!("depth {depth} at ({x},{y}) has no stable disparity")));
        }
        out.set(x, y, depth)?;
    }
    Ok(out)
}

/// Generate `count` samples named `scene_000`, `scene_001`, ...: gt snapped to
/// `rig`, sparse input of `points` randomly drawn gt pixels (all of them when
/// `points` is `None`). Each sample's randomness derives from `seed` and its id.
pub fn synthetic_samples<T: Real>(
    rig: &VirtualRig<T>,
    count: usize,
    points: Option<usize>,
    (z_min, z_max): (f64, f64),
    seed: u64,
) -> Result<Vec<Sample<T>>> {
    (0..count)
        .map(|i| {
            let id = format!("scene_{i:03}");
            let s = derive_seed(seed, &id);
            let scene = SyntheticScene::random(&rig.camera, z_min, z_max, s)?;
            let rendered = render_synthetic(&scene, &rig.camera)?;
            let gt = snap_to_rig(&rendered.gt, rig)?;
            let sparse = match points {
                Some(n) => subsample_points(&gt, n, s ^ 0x5eed),
                None => gt.clone(),
            };
            Sample::new(id, rendered.rgb, sparse, gt)
        })
        .collect()
}
