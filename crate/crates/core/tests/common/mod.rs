//! Brute-force reference implementations shared by the integration suites.
//! They deliberately avoid the library's internals: only plain arithmetic on
//! slices and the public map/image accessors.

#![allow(dead_code)]

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vpp_complete::geometry::{CameraModel, PointCloud, RigidTransform};
use vpp_complete::raster::{DepthMap, DisparityMap, Image};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rotation from a random unit axis and angle (Rodrigues).
pub fn random_rotation(r: &mut ChaCha8Rng) -> [[f64; 3]; 3] {
    let mut axis = [r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0f64)];
    let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt().max(1e-6);
    axis = axis.map(|v| v / n);
    let a: f64 = r.gen_range(-0.3..0.3);
    let (s, c) = a.sin_cos();
    let [x, y, z] = axis;
    let t = 1.0 - c;
    [
        [c + x * x * t, x * y * t - z * s, x * z * t + y * s],
        [y * x * t + z * s, c + y * y * t, y * z * t - x * s],
        [z * x * t - y * s, z * y * t + x * s, c + z * z * t],
    ]
}

/// Per-point projection with a nearest-depth map keyed by pixel.
pub fn oracle_project(
    points: &[[f64; 3]],
    (fx, fy, cx, cy, w, h): (f64, f64, f64, f64, usize, usize),
    rot: &[[f64; 3]; 3],
    t: &[f64; 3],
) -> HashMap<(usize, usize), f64> {
    let mut out: HashMap<(usize, usize), f64> = HashMap::new();
    for p in points {
        let x = rot[0][0] * p[0] + rot[0][1] * p[1] + rot[0][2] * p[2] + t[0];
        let y = rot[1][0] * p[0] + rot[1][1] * p[1] + rot[1][2] * p[2] + t[1];
        let z = rot[2][0] * p[0] + rot[2][1] * p[1] + rot[2][2] * p[2] + t[2];
        if z <= 0.0 {
            continue;
        }
        let u = (fx * x / z + cx).round();
        let v = (fy * y / z + cy).round();
        if u < 0.0 || v < 0.0 || u >= w as f64 || v >= h as f64 {
            continue;
        }
        let e = out.entry((u as usize, v as usize)).or_insert(f64::INFINITY);
        if z < *e {
            *e = z;
        }
    }
    out
}

pub fn random_cloud(r: &mut ChaCha8Rng, n: usize) -> Vec<[f64; 3]> {
    (0..n)
        .map(|_| {
            [
                r.gen_range(-6.0..6.0),
                r.gen_range(-4.0..4.0),
                r.gen_range(-1.0..20.0),
            ]
        })
        .collect()
}

pub fn library_projection(
    points: &[[f64; 3]],
    cam: (f64, f64, f64, f64, usize, usize),
    rot: &[[f64; 3]; 3],
    t: &[f64; 3],
) -> DepthMap<f64> {
    let c = CameraModel::new(cam.0, cam.1, cam.2, cam.3, cam.4, cam.5).unwrap();
    let x = RigidTransform::new(*rot, *t).unwrap();
    vpp_complete::geometry::project_points(&PointCloud::new(points.to_vec()).unwrap(), &c, &x).unwrap()
}

pub fn map_to_hash(m: &DepthMap<f64>) -> HashMap<(usize, usize), f64> {
    m.iter_valid().map(|(x, y, z)| ((x, y), z)).collect()
}

/// Random sparse disparity map: each pixel valid with probability `density`.
pub fn random_disparity(
    r: &mut ChaCha8Rng,
    w: usize,
    h: usize,
    density: f64,
    max_d: f64,
    integer: bool,
) -> DisparityMap<f64> {
    let mut d = DisparityMap::new(w, h);
    for y in 0..h {
        for x in 0..w {
            if r.gen_bool(density) {
                let v = if integer {
                    r.gen_range(1..=max_d as u32) as f64
                } else {
                    r.gen_range(0.5..max_d)
                };
                d.set(x, y, v).unwrap();
            }
        }
    }
    d
}

pub fn random_image(r: &mut ChaCha8Rng, w: usize, h: usize) -> Image<f64> {
    let px = (0..w * h).map(|_| [r.gen(), r.gen(), r.gen()]).collect();
    Image::from_pixels(w, h, px).unwrap()
}

pub fn oracle_luma(img: &Image<f64>) -> Vec<f64> {
    img.pixels()
        .iter()
        .map(|c| 0.299 * c[0] + 0.587 * c[1] + 0.114 * c[2])
        .collect()
}

/// Census bits, neighbors enumerated row-major with the center skipped.
pub fn oracle_census(plane: &[f64], w: usize, h: usize, win: usize) -> Vec<u64> {
    let r = (win / 2) as i64;
    let mut out = vec![0u64; w * h];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let c = plane[(y * w as i64 + x) as usize];
            let mut bit = 0;
            let mut v = 0u64;
            for dy in -r..=r {
                for dx in -r..=r {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let (nx, ny) = (x + dx, y + dy);
                    if nx >= 0 && ny >= 0 && nx < w as i64 && ny < h as i64 && plane[(ny * w as i64 + nx) as usize] < c {
                        v |= 1 << bit;
                    }
                    bit += 1;
                }
            }
            out[(y * w as i64 + x) as usize] = v;
        }
    }
    out
}

pub fn oracle_cost(l: &[u64], r: &[u64], w: usize, h: usize, nd: usize, bits: u32) -> Vec<u32> {
    let mut out = vec![0; w * h * nd];
    for y in 0..h {
        for x in 0..w {
            for d in 0..nd {
                out[(y * w + x) * nd + d] = if x >= d {
                    (l[y * w + x] ^ r[y * w + x - d]).count_ones()
                } else {
                    bits
                };
            }
        }
    }
    out
}

pub const DIRECTIONS_4: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
pub const DIRECTIONS_8: [(i64, i64); 8] = [
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (-1, 1),
    (1, -1),
    (-1, -1),
];

/// Path cost at pixel `(x, y)` for direction `r`, by walking back to the path
/// start and running the recurrence forward along that single chain.
pub fn oracle_path_cost(
    cost: &[u32],
    (w, h, nd): (usize, usize, usize),
    (x, y): (usize, usize),
    (dx, dy): (i64, i64),
    (p1, p2): (u32, u32),
) -> Vec<u32> {
    let mut chain = vec![(x as i64, y as i64)];
    loop {
        let (px, py) = *chain.last().unwrap();
        let (qx, qy) = (px - dx, py - dy);
        if qx < 0 || qy < 0 || qx >= w as i64 || qy >= h as i64 {
            break;
        }
        chain.push((qx, qy));
    }
    chain.reverse();
    let c = |(px, py): (i64, i64), d: usize| cost[(py as usize * w + px as usize) * nd + d];
    let mut l: Vec<u32> = (0..nd).map(|d| c(chain[0], d)).collect();
    for &p in &chain[1..] {
        let m = *l.iter().min().unwrap();
        let next = (0..nd)
            .map(|d| {
                let mut cands = vec![l[d], m + p2];
                if d > 0 {
                    cands.push(l[d - 1] + p1);
                }
                if d + 1 < nd {
                    cands.push(l[d + 1] + p1);
                }
                c(p, d) + cands.into_iter().min().unwrap() - m
            })
            .collect();
        l = next;
    }
    l
}

/// Whole matcher: census, Hamming cost, per-path DP, summed, first-minimum
/// argmin, zero disparity invalid.
#[allow(clippy::too_many_arguments)]
pub fn oracle_sgm(
    left: &Image<f64>,
    right: &Image<f64>,
    win: usize,
    nd: usize,
    pen: (u32, u32),
    paths: usize,
) -> Vec<Option<usize>> {
    let (w, h) = (left.width(), left.height());
    let bits = (win * win - 1) as u32;
    let cl = oracle_census(&oracle_luma(left), w, h, win);
    let cr = oracle_census(&oracle_luma(right), w, h, win);
    let cost = oracle_cost(&cl, &cr, w, h, nd, bits);
    let dirs: &[(i64, i64)] = if paths == 4 { &DIRECTIONS_4 } else { &DIRECTIONS_8 };
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let mut sum = vec![0u32; nd];
            for &dir in dirs {
                for (s, v) in sum.iter_mut().zip(oracle_path_cost(&cost, (w, h, nd), (x, y), dir, pen)) {
                    *s += v;
                }
            }
            let mut best = 0;
            for d in 1..nd {
                if sum[d] < sum[best] {
                    best = d;
                }
            }
            out.push((best > 0).then_some(best));
        }
    }
    out
}

/// Count of patterned reference pixels whose two bilinear taps (weights
/// `1 - frac`, `frac`; zero weights ignored) all land outside `[0, width)`.
pub fn oracle_dropped(reference_disparity: &DisparityMap<f64>) -> usize {
    let w = reference_disparity.width() as f64;
    reference_disparity
        .iter_valid()
        .filter(|&(x, _, d)| {
            let xc = x as f64 - d;
            let f = xc.floor();
            let frac = xc - f;
            let taps = [(f, 1.0 - frac), (f + 1.0, frac)];
            taps.iter()
                .filter(|(_, wt)| *wt > 0.0)
                .all(|(t, _)| *t < 0.0 || *t >= w)
        })
        .count()
}

/// Largest `ceil(d - x)` over valid pixels, floored at zero.
pub fn oracle_left_padding(d: &DisparityMap<f64>) -> usize {
    let mut best = 0i64;
    for y in 0..d.height() {
        for x in 0..d.width() {
            if let Some(v) = d.get(x, y) {
                best = best.max((v - x as f64).ceil() as i64);
            }
        }
    }
    best as usize
}

pub fn oracle_min_filter(z: &DepthMap<f64>, win: usize, tau: f64) -> DepthMap<f64> {
    let r = (win / 2) as i64;
    let mut out = DepthMap::new(z.width(), z.height());
    for y in 0..z.height() as i64 {
        for x in 0..z.width() as i64 {
            let Some(v) = z.get(x as usize, y as usize) else { continue };
            let mut m = v;
            for ny in y - r..=y + r {
                for nx in x - r..=x + r {
                    if nx >= 0 && ny >= 0 && (nx as usize) < z.width() && (ny as usize) < z.height() {
                        if let Some(n) = z.get(nx as usize, ny as usize) {
                            m = m.min(n);
                        }
                    }
                }
            }
            if v - m <= tau {
                out.set(x as usize, y as usize, v).unwrap();
            }
        }
    }
    out
}

/// `(mae, rmse, count)` over pixels valid in both maps.
pub fn oracle_metrics(pred: &DepthMap<f64>, gt: &DepthMap<f64>) -> (f64, f64, usize) {
    let (mut a, mut s, mut n) = (0.0, 0.0, 0);
    for y in 0..gt.height() {
        for x in 0..gt.width() {
            if let (Some(p), Some(g)) = (pred.get(x, y), gt.get(x, y)) {
                a += (p - g).abs();
                s += (p - g) * (p - g);
                n += 1;
            }
        }
    }
    (a / n as f64, (s / n as f64).sqrt(), n)
}
