//! Minimal line chart of relative accuracy against baseline, as an RGB PNG.

use std::path::Path;

use crate::dataset::png_io::write_png;
use crate::error::{Error, Result};

const WIDTH: usize = 480;
const HEIGHT: usize = 320;
const MARGIN: usize = 40;

struct Canvas {
    data: Vec<u8>,
}

impl Canvas {
    fn new() -> Self {
        Self {
            data: vec![255; WIDTH * HEIGHT * 3],
        }
    }

    fn put(&mut self, x: i64, y: i64, c: [u8; 3]) {
        if x >= 0 && y >= 0 && (x as usize) < WIDTH && (y as usize) < HEIGHT {
            let o = (y as usize * WIDTH + x as usize) * 3;
            self.data[o..o + 3].copy_from_slice(&c);
        }
    }

    fn line(&mut self, (x0, y0): (i64, i64), (x1, y1): (i64, i64), c: [u8; 3]) {
        let (dx, dy) = ((x1 - x0).abs(), -(y1 - y0).abs());
        let (sx, sy) = (if x0 < x1 { 1 } else { -1 }, if y0 < y1 { 1 } else { -1 });
        let (mut x, mut y, mut err) = (x0, y0, dx + dy);
        loop {
            self.put(x, y, c);
            if x == x1 && y == y1 {
                break;
            }
            let e2 = 2 * err;
            if e2 >= dy {
                err += dy;
                x += sx;
            }
            if e2 <= dx {
                err += dx;
                y += sy;
            }
        }
    }

    fn dot(&mut self, (x, y): (i64, i64), c: [u8; 3]) {
        for dy in -2..=2 {
            for dx in -2..=2 {
                self.put(x + dx, y + dy, c);
            }
        }
    }
}

/// Plot `(baseline, relative accuracy)` points: x spans the baseline range,
/// y spans [0, 1] with light grid lines every 0.2.
pub fn plot_relative_accuracy(path: impl AsRef<Path>, points: &[(f64, f64)]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::Input("nothing to plot".into()));
    }
    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let (pw, ph) = ((WIDTH - 2 * MARGIN) as f64, (HEIGHT - 2 * MARGIN) as f64);
    let to_px = |(b, r): (f64, f64)| {
        let x = MARGIN as f64 + (b - lo) / span * pw;
        let y = (HEIGHT - MARGIN) as f64 - r.clamp(0.0, 1.0) * ph;
        (x.round() as i64, y.round() as i64)
    };

    let mut c = Canvas::new();
    let (left, right) = (MARGIN as i64, (WIDTH - MARGIN) as i64);
    let (top, bottom) = (MARGIN as i64, (HEIGHT - MARGIN) as i64);
    for k in 1..=5 {
        let y = to_px((lo, k as f64 * 0.2)).1;
        c.line((left, y), (right, y), [220, 220, 220]);
    }
    c.line((left, bottom), (right, bottom), [0, 0, 0]);
    c.line((left, top), (left, bottom), [0, 0, 0]);

    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in sorted.windows(2) {
        c.line(to_px(w[0]), to_px(w[1]), [31, 119, 180]);
    }
    for &p in &sorted {
        let x = to_px(p).0;
        c.line((x, bottom), (x, bottom + 4), [0, 0, 0]);
        c.dot(to_px(p), [214, 39, 40]);
    }
    write_png(
        path.as_ref(),
        WIDTH,
        HEIGHT,
        png::ColorType::Rgb,
        png::BitDepth::Eight,
        &c.data,
    )
}
