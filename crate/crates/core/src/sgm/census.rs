use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest census window whose bit string fits in a `u64`.
pub const MAX_CENSUS_WINDOW: usize = 7;

/// Per-pixel census bit strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusImage {
    pub width: usize,
    pub height: usize,
    /// Number of meaningful bits per pixel (`window² - 1`).
    pub bits: u32,
    pub data: Vec<u64>,
}

impl CensusImage {
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u64 {
        self.data[y * self.width + x]
    }
}

pub(crate) fn check_window(window: usize) -> Result<()> {
    if window < 3 || window.is_multiple_of(2) || window > MAX_CENSUS_WINDOW {
        return Err(Error::Config(format!(
            "census window must be odd in 3..={MAX_CENSUS_WINDOW}, got {window}"
        )));
    }
    Ok(())
}

/// Census transform of a row-major intensity plane.
///
/// Bit `k` enumerates the window offsets in row-major order with the center
/// skipped; it is set when that neighbor is strictly darker than the center.
/// Neighbors outside the image leave their bit clear.
pub fn census_transform<T: Real>(
    plane: &[T],
    width: usize,
    height: usize,
    window: usize,
) -> Result<CensusImage> {
    check_window(window)?;
    if plane.len() != width * height {
        return Err(Error::Input(format!(
            "intensity plane has {} samples, expected {}",
            plane.len(),
            width * height
        )));
    }
    let r = (window / 2) as isize;
    let offsets: Vec<(isize, isize)> = (-r..=r)
        .flat_map(|dy| (-r..=r).map(move |dx| (dx, dy)))
        .filter(|&o| o != (0, 0))
        .collect();
    let mut data = vec![0u64; width * height];
    for y in 0..height {
        for x in 0..width {
            let center = plane[y * width + x];
            let mut code = 0u64;
            for (k, &(dx, dy)) in offsets.iter().enumerate() {
                let (nx, ny) = (x as isize + dx, y as isize + dy);
                if nx < 0 || ny < 0 || nx >= width as isize || ny >= height as isize {
                    continue;
                }
                if plane[ny as usize * width + nx as usize] < center {
                    code |= 1 << k;
                }
            }
            data[y * width + x] = code;
        }
    }
    Ok(CensusImage {
        width,
        height,
        bits: offsets.len() as u32,
        data,
    })
}
