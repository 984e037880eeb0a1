use crate::error::{Error, Result};
use crate::sgm::census::CensusImage;

/// Dense `height x width x disparities` volume of integer costs, disparity innermost.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostVolume<C> {
    pub width: usize,
    pub height: usize,
    pub disparities: usize,
    pub data: Vec<C>,
}

impl<C: Copy> CostVolume<C> {
    pub fn filled(width: usize, height: usize, disparities: usize, value: C) -> Self {
        Self {
            width,
            height,
            disparities,
            data: vec![value; width * height * disparities],
        }
    }

    #[inline]
    pub fn offset(&self, x: usize, y: usize) -> usize {
        (y * self.width + x) * self.disparities
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, d: usize) -> C {
        self.data[self.offset(x, y) + d]
    }

    /// Costs of all disparities at one pixel.
    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> &[C] {
        let o = self.offset(x, y);
        &self.data[o..o + self.disparities]
    }
}

/// Hamming distance between `reference(x, y)` and `target(x - d, y)`.
///
/// Candidates with `x - d < 0` get the sentinel: the census bit count, the
/// largest cost a real match can reach.
pub fn matching_cost(
    reference: &CensusImage,
    target: &CensusImage,
    disparities: usize,
) -> Result<CostVolume<u16>> {
    if reference.width != target.width || reference.height != target.height {
        return Err(Error::Input(format!(
            "census images differ in size: {}x{} vs {}x{}",
            reference.width, reference.height, target.width, target.height
        )));
    }
    if disparities == 0 {
        return Err(Error::Config("disparity range must be positive".into()));
    }
    let sentinel = reference.bits.max(target.bits) as u16;
    let (w, h) = (reference.width, reference.height);
    let mut cv = CostVolume::filled(w, h, disparities, sentinel);
    for y in 0..h {
        for x in 0..w {
            let r = reference.get(x, y);
            let o = cv.offset(x, y);
            for d in 0..disparities.min(x + 1) {
                cv.data[o + d] = (r ^ target.get(x - d, y)).count_ones() as u16;
            }
        }
    }
    Ok(cv)
}
