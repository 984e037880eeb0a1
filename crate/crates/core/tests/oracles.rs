mod common;

use common::*;
use rand::Rng;

use vpp_complete::dataset::{kitti_crop, lidar_min_filter, Sample};
use vpp_complete::eval::{evaluate, InvalidPolicy};
use vpp_complete::geometry::{depth_to_disparity, disparity_to_depth, CameraModel, VirtualRig};
use vpp_complete::pattern::{compute_left_padding, crop_output, project, PatternConfig, PatternMode};
use vpp_complete::raster::{DepthMap, Image};
use vpp_complete::sgm::{
    aggregate_direction, census_transform, matching_cost, MatcherConfig, Penalties, SgmMatcher, PATHS_8,
};

const CAM: (f64, f64, f64, f64, usize, usize) = (120.0, 110.0, 32.0, 24.0, 64, 48);

#[test]
fn projection_matches_oracle_on_random_clouds() {
    let mut r = rng(1);
    for _ in 0..20 {
        let pts = random_cloud(&mut r, 100);
        let rot = random_rotation(&mut r);
        let t = [r.gen_range(-0.5..0.5), r.gen_range(-0.5..0.5), r.gen_range(-0.5..0.5)];
        let lib = library_projection(&pts, CAM, &rot, &t);
        assert_eq!(map_to_hash(&lib), oracle_project(&pts, CAM, &rot, &t));
    }
}

#[test]
fn depth_disparity_round_trip() {
    let mut r = rng(2);
    let cam = CameraModel::new(721.0, 721.0, 600.0, 180.0, 1216, 352).unwrap();
    let rig = VirtualRig::new(cam, 0.54).unwrap();
    let vals: Vec<f64> = (0..4096).map(|_| 10f64.powf(r.gen_range(-1.0..3.0))).collect();
    let z = DepthMap::from_values(64, 64, vals).unwrap();
    let back = disparity_to_depth(&depth_to_disparity(&z, &rig).unwrap(), &rig).unwrap();
    for (x, y, v) in z.iter_valid() {
        let b = back.get(x, y).unwrap();
        assert!(((b - v) / v).abs() <= 1e-9);
    }
}

#[test]
fn left_padding_matches_scan() {
    let mut r = rng(3);
    for _ in 0..50 {
        let d = random_disparity(&mut r, 40, 6, 0.1, 30.0, false);
        assert_eq!(compute_left_padding(&d), oracle_left_padding(&d));
    }
}

#[test]
fn census_matches_naive_loop() {
    let mut r = rng(4);
    for win in [3, 5, 7] {
        let img = random_image(&mut r, 16, 16);
        let plane = oracle_luma(&img);
        let lib = census_transform(&img.luma_plane(), 16, 16, win).unwrap();
        assert_eq!(lib.data, oracle_census(&plane, 16, 16, win));
    }
}

#[test]
fn cost_matches_popcount() {
    let mut r = rng(5);
    let (a, b) = (random_image(&mut r, 12, 9), random_image(&mut r, 12, 9));
    let ca = census_transform(&a.luma_plane(), 12, 9, 5).unwrap();
    let cb = census_transform(&b.luma_plane(), 12, 9, 5).unwrap();
    let cv = matching_cost(&ca, &cb, 7).unwrap();
    let oracle = oracle_cost(&ca.data, &cb.data, 12, 9, 7, 24);
    let lib: Vec<u32> = cv.data.iter().map(|&c| c as u32).collect();
    assert_eq!(lib, oracle);
}

#[test]
fn path_costs_match_chain_dp_and_bound() {
    let mut r = rng(6);
    for _ in 0..30 {
        let (w, h, nd) = (r.gen_range(1..8), r.gen_range(1..8), r.gen_range(1..8));
        let cost: Vec<u16> = (0..w * h * nd).map(|_| r.gen_range(0..24)).collect();
        let cv = vpp_complete::sgm::CostVolume {
            width: w,
            height: h,
            disparities: nd,
            data: cost.clone(),
        };
        let p1 = r.gen_range(0..6);
        let pen = Penalties { p1, p2: p1 + r.gen_range(1..20) };
        let cost32: Vec<u32> = cost.iter().map(|&c| c as u32).collect();
        for dir in PATHS_8 {
            let lib = aggregate_direction(&cv, dir, pen);
            for y in 0..h {
                for x in 0..w {
                    let o = oracle_path_cost(&cost32, (w, h, nd), (x, y), (dir.0 as i64, dir.1 as i64), (pen.p1, pen.p2));
                    assert_eq!(lib.pixel(x, y), &o[..]);
                    for d in 0..nd {
                        assert!(o[d] - cost32[(y * w + x) * nd + d] <= pen.p2);
                    }
                }
            }
        }
    }
}

#[test]
fn sgm_matches_exhaustive_oracle() {
    let mut r = rng(7);
    for _ in 0..40 {
        let (w, h, nd) = (r.gen_range(2..=8), r.gen_range(1..=8), r.gen_range(1..=8));
        let win = [3, 5][r.gen_range(0..2)];
        let paths = [4, 8][r.gen_range(0..2)];
        let (a, b) = (random_image(&mut r, w, h), random_image(&mut r, w, h));
        let p1 = r.gen_range(0..8);
        let p2 = p1 + r.gen_range(1..30);
        let cfg = MatcherConfig {
            max_disparity: Some(nd),
            census_window: win,
            p1: Some(p1),
            p2: Some(p2),
            num_paths: paths,
            subpixel: false,
            lr_threshold: None,
        };
        let lib = SgmMatcher::new(cfg).unwrap().match_images(&a, &b, nd).unwrap();
        let lib: Vec<Option<usize>> = (0..h)
            .flat_map(|y| (0..w).map(move |x| (x, y)))
            .map(|(x, y)| lib.get(x, y).map(|d: f64| d as usize))
            .collect();
        assert_eq!(lib, oracle_sgm(&a, &b, win, nd, (p1, p2), paths));
    }
}

#[test]
fn min_filter_matches_window_scan() {
    let mut r = rng(8);
    for _ in 0..20 {
        let mut z = DepthMap::<f64>::new(30, 20);
        for y in 0..20 {
            for x in 0..30 {
                if r.gen_bool(0.2) {
                    z.set(x, y, r.gen_range(1.0..40.0)).unwrap();
                }
            }
        }
        let tau = r.gen_range(0.1..5.0);
        let lib = lidar_min_filter(&z, 7, tau).unwrap();
        assert_eq!(lib, oracle_min_filter(&z, 7, tau));
        assert!(lib.iter_valid().all(|(x, y, v)| z.get(x, y) == Some(v)));
    }
}

#[test]
fn metrics_match_double_loop() {
    let mut r = rng(9);
    for _ in 0..20 {
        let mut p = DepthMap::<f64>::new(17, 11);
        let mut g = DepthMap::<f64>::new(17, 11);
        for y in 0..11 {
            for x in 0..17 {
                if r.gen_bool(0.8) {
                    p.set(x, y, r.gen_range(0.5..10.0)).unwrap();
                }
                if r.gen_bool(0.7) {
                    g.set(x, y, r.gen_range(0.5..10.0)).unwrap();
                }
            }
        }
        let m = evaluate(&p, &g, InvalidPolicy::Exclude).unwrap();
        let (mae, rmse, n) = oracle_metrics(&p, &g);
        assert!((m.mae - mae).abs() <= 1e-12 * mae.max(1.0));
        assert!((m.rmse - rmse).abs() <= 1e-12 * rmse.max(1.0));
        assert_eq!(m.valid_count, n);
        assert_eq!(m.valid_count + m.invalid_pred, g.valid_count());
    }
}

#[test]
fn kitti_crop_index_arithmetic() {
    for (w, h) in [(1242, 375), (1280, 384), (1216, 340)] {
        let vals: Vec<f64> = (0..w * h).map(|i| (i + 1) as f64).collect();
        let z = DepthMap::from_values(w, h, vals).unwrap();
        let s = Sample::new("k".into(), Image::black(w, h), z.clone(), z).unwrap();
        let c = kitti_crop(&s).unwrap();
        let (x0, y0) = ((w - 1216) / 2, 100 + (h - 100 - 240) / 2);
        for (x, y) in [(0, 0), (1215, 239), (600, 17)] {
            assert_eq!(c.gt.get(x, y), s.gt.get(x0 + x, y0 + y));
        }
    }
}

#[test]
fn dense_integer_coherence_scan() {
    let mut r = rng(10);
    for mode in [PatternMode::Rgb, PatternMode::Random] {
        let img = random_image(&mut r, 40, 12);
        let d = random_disparity(&mut r, 40, 12, 1.0, 12.0, true);
        let cfg = PatternConfig {
            mode,
            patch_size: 1,
            ..PatternConfig::default()
        };
        let pair = project(&img, &d, &cfg).unwrap();
        let mut checked = 0;
        for y in 0..12 {
            for xt in 0..pair.width() {
                // foreground source of this target pixel, first in row order on ties
                let best = (0..pair.width())
                    .filter_map(|x| pair.reference_disparity.get(x, y).map(|dd| (x, dd)))
                    .filter(|&(x, dd)| x as f64 - dd == xt as f64)
                    .fold(None, |acc: Option<(usize, f64)>, c| match acc {
                        Some(a) if a.1 >= c.1 => Some(a),
                        _ => Some(c),
                    });
                if let Some((x, _)) = best {
                    assert_eq!(pair.target.get(xt, y), pair.reference.get(x, y));
                    checked += 1;
                } else {
                    assert!(pair.target.is_black(xt, y));
                }
            }
        }
        assert!(checked > 0);
    }
}

#[test]
fn padding_differential_when_warps_stay_inside() {
    let mut r = rng(11);
    let img = random_image(&mut r, 48, 10);
    let mut d = random_disparity(&mut r, 48, 10, 0.3, 8.0, false);
    for y in 0..10 {
        for x in 0..48 {
            if let Some(v) = d.get(x, y) {
                if v > x as f64 - 2.0 {
                    d.invalidate(x, y);
                }
            }
        }
    }
    let base = PatternConfig::<f64> {
        patch_size: 5,
        ..PatternConfig::default()
    };
    let on = project(&img, &d, &PatternConfig { left_padding: true, ..base }).unwrap();
    let off = project(&img, &d, &PatternConfig { left_padding: false, ..base }).unwrap();
    assert_eq!(on.pad_left, 0);
    let m = SgmMatcher::new(MatcherConfig { max_disparity: Some(16), ..MatcherConfig::default() }).unwrap();
    let a = crop_output(&m.match_pair(&on).unwrap(), on.pad_left, 48).unwrap();
    let b = crop_output(&m.match_pair(&off).unwrap(), off.pad_left, 48).unwrap();
    assert_eq!(a, b);
}
