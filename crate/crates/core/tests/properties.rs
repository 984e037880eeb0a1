mod common;

use common::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use vpp_complete::dataset::lidar_min_filter;
use vpp_complete::eval::{evaluate, InvalidPolicy};
use vpp_complete::geometry::{depth_to_disparity, CameraModel, PointCloud, RigidTransform, VirtualRig};
use vpp_complete::pattern::{adaptive_weights, project, PatternConfig, PatternMode, ScoreBuffer, TargetCanvas};
use vpp_complete::raster::{DepthMap, Image};
use vpp_complete::sgm::{wta_disparity, CostVolume, WtaOptions};

fn patch_sizes() -> impl Strategy<Value = usize> {
    prop::sample::select(vec![1usize, 3, 5, 7, 9])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_is_idempotent(seed in any::<u64>()) {
        let mut r = rng(seed);
        let pts = random_cloud(&mut r, 300);
        let cam = CameraModel::new(100.0, 100.0, 20.0, 15.0, 40, 30).unwrap();
        let cloud = PointCloud::new(pts).unwrap();
        let x = RigidTransform::identity();
        let a = vpp_complete::geometry::project_points(&cloud, &cam, &x).unwrap();
        let b = vpp_complete::geometry::project_points(&cloud, &cam, &x).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn disparity_decreases_with_depth(z in 0.1f64..1000.0, dz in 1e-6f64..100.0, b in 0.01f64..1.0) {
        let cam = CameraModel::new(500.0, 500.0, 10.0, 10.0, 20, 20).unwrap();
        let rig = VirtualRig::new(cam, b).unwrap();
        prop_assert!(rig.depth_to_disparity_value(z + dz) < rig.depth_to_disparity_value(z));
    }

    #[test]
    fn splat_weights_sum_to_one(x in 0.0f64..50.0) {
        let mut c = TargetCanvas::<f64>::new(60, 1);
        let out = c.splat(x, 0, [0.5; 3], 1.0);
        let total: f64 = out.taps.iter().flatten().map(|t| t.1).sum();
        prop_assert_eq!(total, 1.0);
    }

    #[test]
    fn target_keeps_foreground(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut c = TargetCanvas::<f64>::new(20, 1);
        let sources: Vec<(f64, f64, [f64; 3])> = (0..30)
            .map(|_| {
                let d = r.gen_range(1..6) as f64;
                (r.gen_range(0..20) as f64, d, [r.gen(), r.gen(), r.gen()])
            })
            .collect();
        for &(xc, d, col) in &sources {
            c.splat(xc, 0, col, d);
        }
        let img = c.resolve();
        for xt in 0..20 {
            let best = sources
                .iter()
                .filter(|s| s.0 == xt as f64)
                .fold(None, |acc: Option<&(f64, f64, [f64; 3])>, s| match acc {
                    Some(a) if a.1 >= s.1 => Some(a),
                    _ => Some(s),
                });
            match best {
                Some(s) => prop_assert_eq!(img.get(xt, 0), s.2),
                None => prop_assert!(img.is_black(xt, 0)),
            }
        }
    }

    #[test]
    fn background_stays_black_and_padding_drops_nothing(
        seed in any::<u64>(),
        patch in patch_sizes(),
        adaptive in any::<bool>(),
        rgb in any::<bool>(),
    ) {
        let mut r = rng(seed);
        let img = random_image(&mut r, 36, 10);
        let d = random_disparity(&mut r, 36, 10, 0.08, 25.0, false);
        let cfg = PatternConfig {
            mode: if rgb { PatternMode::Rgb } else { PatternMode::Random },
            patch_size: patch,
            adaptive,
            left_padding: true,
            ..PatternConfig::default()
        };
        let pair = project(&img, &d, &cfg).unwrap();
        prop_assert_eq!(pair.stats.dropped_warps, 0);
        prop_assert_eq!(pair.reference.width(), 36 + pair.pad_left);
        prop_assert_eq!(pair.target.width(), pair.reference.width());
        for y in 0..10 {
            for x in 0..pair.width() {
                if !pair.reference_disparity.is_valid(x, y) {
                    prop_assert!(pair.reference.is_black(x, y));
                }
            }
        }
        let unpadded = PatternConfig { left_padding: false, ..cfg };
        let off = project(&img, &d, &unpadded).unwrap();
        prop_assert_eq!(off.pad_left, 0);
        prop_assert_eq!(off.stats.dropped_warps, oracle_dropped(&off.reference_disparity));
    }

    #[test]
    fn same_seed_same_pair(seed in any::<u64>(), patch in patch_sizes()) {
        let mut r = rng(seed);
        let img = random_image(&mut r, 24, 8);
        let d = random_disparity(&mut r, 24, 8, 0.2, 10.0, false);
        let cfg = PatternConfig { patch_size: patch, rng_seed: seed, ..PatternConfig::default() };
        prop_assert_eq!(project(&img, &d, &cfg).unwrap(), project(&img, &d, &cfg).unwrap());
    }

    #[test]
    fn constant_image_gives_translation_invariant_shape(x in 4usize..16, y in 4usize..8, patch in patch_sizes()) {
        let img = Image::<f64>::filled(20, 12, [0.4, 0.4, 0.4]).unwrap();
        let shape = |cx: usize, cy: usize| -> Vec<(i64, i64)> {
            adaptive_weights(&img, cx, cy, patch, 1.0, 1.0)
                .eligible(0.001)
                .map(|(px, py, _)| (px as i64 - cx as i64, py as i64 - cy as i64))
                .collect()
        };
        let r = patch / 2;
        prop_assume!(x >= r && y >= r && x + r < 20 && y + r < 12);
        prop_assert_eq!(shape(x, y), shape(10.min(19 - r).max(r), 6.min(11 - r).max(r)));
    }

    #[test]
    fn score_buffer_ignores_order_for_distinct_scores(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut cands: Vec<(usize, f64, [f64; 3])> = (0..40)
            .map(|i| (r.gen_range(0..6), 0.001 + i as f64 / 50.0, [r.gen(), r.gen(), r.gen()]))
            .collect();
        let run = |c: &[(usize, f64, [f64; 3])]| {
            let mut b = ScoreBuffer::new(6, 1);
            for &(x, s, col) in c {
                b.insert(x, 0, s, col, 1.0);
            }
            (0..6).map(|x| b.winner(x, 0)).collect::<Vec<_>>()
        };
        let first = run(&cands);
        cands.shuffle(&mut r);
        prop_assert_eq!(first, run(&cands));
    }

    #[test]
    fn min_filter_never_adds_points(seed in any::<u64>(), tau in 0.0f64..5.0) {
        let mut r = rng(seed);
        let mut z = DepthMap::<f64>::new(25, 15);
        for y in 0..15 {
            for x in 0..25 {
                if r.gen_bool(0.3) {
                    z.set(x, y, r.gen_range(0.5..30.0)).unwrap();
                }
            }
        }
        let f = lidar_min_filter(&z, 7, tau).unwrap();
        prop_assert!(f.iter_valid().all(|(x, y, v)| z.get(x, y) == Some(v)));
    }

    #[test]
    fn rmse_bounds_mae(seed in any::<u64>(), penalty in prop::option::of(0.0f64..10.0)) {
        let mut r = rng(seed);
        let vals = |r: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
            (0..64).map(|_| if r.gen_bool(0.8) { r.gen_range(0.1..50.0) } else { 0.0 }).collect()
        };
        let p = DepthMap::from_values(8, 8, vals(&mut r)).unwrap();
        let g = DepthMap::from_values(8, 8, vals(&mut r)).unwrap();
        let policy = penalty.map_or(InvalidPolicy::Exclude, InvalidPolicy::Penalty);
        if let Ok(m) = evaluate(&p, &g, policy) {
            prop_assert!(m.rmse >= m.mae && m.mae >= 0.0);
            prop_assert!(m.valid_count <= 64);
        }
    }

    #[test]
    fn lr_survivors_are_consistent(seed in any::<u64>(), t in 0.0f64..2.0) {
        let mut r = rng(seed);
        let (w, h, nd) = (r.gen_range(2..12), r.gen_range(1..4), r.gen_range(1..8));
        let data: Vec<u32> = (0..w * h * nd).map(|_| r.gen_range(0..50)).collect();
        let cv = CostVolume { width: w, height: h, disparities: nd, data };
        let out = wta_disparity::<f64>(&cv, WtaOptions { subpixel: false, lr_threshold: Some(t) });
        let first_min = |v: Vec<u32>| (0..v.len()).fold(0, |b, i| if v[i] < v[b] { i } else { b });
        for (x, y, d) in out.iter_valid() {
            let dl = d as usize;
            prop_assert!(dl <= x);
            let xr = x - dl;
            let right: Vec<u32> = (0..nd.min(w - xr)).map(|k| cv.get(xr + k, y, k)).collect();
            let dr = first_min(right);
            prop_assert!((dl as f64 - dr as f64).abs() <= t);
        }
    }

    #[test]
    fn sparse_disparity_keeps_mask(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cam = CameraModel::new(300.0, 300.0, 10.0, 5.0, 20, 10).unwrap();
        let rig = VirtualRig::new(cam, 0.15).unwrap();
        let vals: Vec<f64> = (0..200).map(|_| if r.gen_bool(0.5) { r.gen_range(0.5..20.0) } else { 0.0 }).collect();
        let z = DepthMap::from_values(20, 10, vals).unwrap();
        let d = depth_to_disparity(&z, &rig).unwrap();
        prop_assert_eq!(d.mask(), z.mask());
    }
}
