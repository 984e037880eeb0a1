use serde::Serialize;

use crate::error::{Error, Result};
use crate::raster::DepthMap;
use crate::scalar::Real;

/// How ground-truth pixels without a prediction enter the error.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum InvalidPolicy {
    /// Counted in `invalid_pred`, left out of the means.
    #[default]
    Exclude,
    /// Each contributes a fixed absolute error in meters.
    Penalty(f64),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Metrics {
    pub mae: f64,
    pub rmse: f64,
    /// Pixels entering the means.
    pub valid_count: usize,
    /// Ground-truth pixels the prediction left invalid.
    pub invalid_pred: usize,
    pub dropped_warps: usize,
}

/// MAE and RMSE over pixels with valid ground truth, accumulated in `f64` in
/// row-major order.
pub fn evaluate<T: Real>(pred: &DepthMap<T>, gt: &DepthMap<T>, policy: InvalidPolicy) -> Result<Metrics> {
    if !pred.same_shape(gt) {
        return Err(Error::Input(format!(
            "prediction is {}x{} but ground truth is {}x{}",
            pred.width(),
            pred.height(),
            gt.width(),
            gt.height()
        )));
    }
    let (mut abs, mut sq) = (0.0f64, 0.0f64);
    let (mut n, mut missing) = (0usize, 0usize);
    for (x, y, g) in gt.iter_valid() {
        let err = match (pred.get(x, y), policy) {
            (Some(p), _) => (p.as_f64() - g.as_f64()).abs(),
            (None, InvalidPolicy::Exclude) => {
                missing += 1;
                continue;
            }
            (None, InvalidPolicy::Penalty(e)) => {
                missing += 1;
                e
            }
        };
        abs += err;
        sq += err * err;
        n += 1;
    }
    if n == 0 {
        return Err(Error::Input(
            "no pixel has both a valid prediction and valid ground truth".into(),
        ));
    }
    let mae = abs / n as f64;
    // guard the last ulp so rmse >= mae holds after rounding
    let rmse = (sq / n as f64).sqrt().max(mae);
    Ok(Metrics {
        mae,
        rmse,
        valid_count: n,
        invalid_pred: missing,
        dropped_warps: 0,
    })
}

/// Mean of per-sample errors; counters are summed.
pub fn summarize(rows: &[Metrics]) -> Metrics {
    if rows.is_empty() {
        return Metrics::default();
    }
    let k = rows.len() as f64;
    Metrics {
        mae: rows.iter().map(|m| m.mae).sum::<f64>() / k,
        rmse: rows.iter().map(|m| m.rmse).sum::<f64>() / k,
        valid_count: rows.iter().map(|m| m.valid_count).sum(),
        invalid_pred: rows.iter().map(|m| m.invalid_pred).sum(),
        dropped_warps: rows.iter().map(|m| m.dropped_warps).sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(v: &[f64]) -> DepthMap<f64> {
        DepthMap::from_values(v.len(), 1, v.to_vec()).unwrap()
    }

    #[test]
    fn two_pixels() {
        let m = evaluate(&map(&[1.0, 2.0]), &map(&[1.0, 3.0]), InvalidPolicy::Exclude).unwrap();
        assert_eq!(m.mae, 0.5);
        assert!((m.rmse - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(m.valid_count, 2);
    }

    #[test]
    fn exact_prediction() {
        let g = map(&[1.0, 2.0, 7.5]);
        let m = evaluate(&g, &g, InvalidPolicy::Exclude).unwrap();
        assert_eq!((m.mae, m.rmse), (0.0, 0.0));
    }

    #[test]
    fn invalid_prediction_policies() {
        let pred = map(&[1.0, 0.0, 2.0]);
        let gt = map(&[1.0, 4.0, 3.0]);
        let ex = evaluate(&pred, &gt, InvalidPolicy::Exclude).unwrap();
        assert_eq!((ex.mae, ex.valid_count, ex.invalid_pred), (0.5, 2, 1));
        let pen = evaluate(&pred, &gt, InvalidPolicy::Penalty(5.0)).unwrap();
        assert_eq!((pen.mae, pen.valid_count, pen.invalid_pred), (2.0, 3, 1));
    }

    #[test]
    fn empty_overlap_is_an_error() {
        assert!(evaluate(&map(&[0.0]), &map(&[1.0]), InvalidPolicy::Exclude).is_err());
    }
}
