//! Semi-global cost aggregation along straight scanline paths.

use rayon::prelude::*;

use crate::sgm::cost::CostVolume;

/// Path directions `(dx, dy)`; the recurrence looks back to `(x - dx, y - dy)`.
pub const PATHS_8: [(isize, isize); 8] = [
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (-1, 1),
    (1, -1),
    (-1, -1),
];

/// Smoothness penalties in cost units.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Penalties {
    pub p1: u32,
    pub p2: u32,
}

/// Path costs for one direction:
///
/// `L(p, d) = C(p, d) + min(L(q, d), L(q, d±1) + P1, min_k L(q, k) + P2) - min_k L(q, k)`
/// with `q = p - r`; at the first pixel of each path `L = C`.
pub fn aggregate_direction(cv: &CostVolume<u16>, dir: (isize, isize), pen: Penalties) -> CostVolume<u32> {
    let mut out = CostVolume::filled(cv.width, cv.height, cv.disparities, 0u32);
    scan_direction(cv, dir, pen, |o, l| out.data[o..o + l.len()].copy_from_slice(l));
    out
}

/// Run the recurrence, handing each pixel's path costs to `emit` with the
/// pixel's volume offset. Only two rows of path costs are kept.
fn scan_direction(
    cv: &CostVolume<u16>,
    (dx, dy): (isize, isize),
    pen: Penalties,
    mut emit: impl FnMut(usize, &[u32]),
) {
    let (w, h, nd) = (cv.width, cv.height, cv.disparities);
    let rows: Vec<usize> = if dy >= 0 { (0..h).collect() } else { (0..h).rev().collect() };
    let cols: Vec<usize> = if dx >= 0 { (0..w).collect() } else { (0..w).rev().collect() };
    let mut prev_row = vec![0u32; w * nd];
    let mut row = vec![0u32; w * nd];
    let mut prev = vec![0u32; nd];
    for (ri, &y) in rows.iter().enumerate() {
        for &x in &cols {
            let px = x as isize - dx;
            let cost = cv.pixel(x, y);
            let o = x * nd;
            if px < 0 || px >= w as isize || (dy != 0 && ri == 0) {
                for d in 0..nd {
                    row[o + d] = cost[d] as u32;
                }
            } else {
                let po = px as usize * nd;
                let src = if dy == 0 { &row } else { &prev_row };
                prev.copy_from_slice(&src[po..po + nd]);
                let min_prev = prev.iter().copied().min().unwrap_or(0);
                let jump = min_prev + pen.p2;
                for d in 0..nd {
                    let mut best = prev[d];
                    if d > 0 {
                        best = best.min(prev[d - 1] + pen.p1);
                    }
                    if d + 1 < nd {
                        best = best.min(prev[d + 1] + pen.p1);
                    }
                    best = best.min(jump);
                    row[o + d] = cost[d] as u32 + best - min_prev;
                }
            }
            emit(cv.offset(x, y), &row[o..o + nd]);
        }
        std::mem::swap(&mut row, &mut prev_row);
    }
}

/// Sum of path costs over the first `num_paths` entries of [`PATHS_8`].
///
/// Directions are aggregated in parallel; integer addition keeps the sum
/// independent of scheduling.
pub fn aggregate_paths(cv: &CostVolume<u16>, num_paths: usize, pen: Penalties) -> CostVolume<u32> {
    let dirs = &PATHS_8[..num_paths.min(PATHS_8.len())];
    let zero = || CostVolume::filled(cv.width, cv.height, cv.disparities, 0u32);
    dirs.par_iter()
        .fold(zero, |mut sum, &dir| {
            scan_direction(cv, dir, pen, |o, l| {
                for (s, v) in sum.data[o..o + l.len()].iter_mut().zip(l) {
                    *s += *v;
                }
            });
            sum
        })
        .reduce(zero, |mut a, b| {
            for (s, v) in a.data.iter_mut().zip(&b.data) {
                *s += *v;
            }
            a
        })
}
