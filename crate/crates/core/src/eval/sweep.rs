use std::collections::BTreeSet;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::dataset::Sample;
use crate::error::{Error, Result};
use crate::eval::metrics::{summarize, Metrics};
use crate::eval::pipeline::{complete, PipelineConfig};
use crate::pattern::PatternConfig;
use crate::scalar::Real;
use crate::seed::derive_seed;
use crate::sgm::StereoMatcher;

/// One cell of the patch hyper-parameter grid. `adaptive` is `None` for
/// point-wise projection, where it has no meaning.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PatchCell {
    pub patch_size: usize,
    pub adaptive: Option<bool>,
    pub padding: bool,
}

impl PatchCell {
    pub fn apply<T: Real>(&self, base: &PatternConfig<T>) -> PatternConfig<T> {
        PatternConfig {
            patch_size: self.patch_size,
            adaptive: self.adaptive.unwrap_or(false),
            left_padding: self.padding,
            ..*base
        }
    }
}

/// The full grid: point-wise with and without padding, then sizes 3 to 9 with
/// every adaptive / padding combination (18 cells).
pub fn patch_grid() -> Vec<PatchCell> {
    let mut cells = Vec::with_capacity(18);
    for padding in [false, true] {
        cells.push(PatchCell {
            patch_size: 1,
            adaptive: None,
            padding,
        });
    }
    for patch_size in [3, 5, 7, 9] {
        for adaptive in [false, true] {
            for padding in [false, true] {
                cells.push(PatchCell {
                    patch_size,
                    adaptive: Some(adaptive),
                    padding,
                });
            }
        }
    }
    cells
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    /// Axis values, in the order of [`SweepReport::axes`].
    pub params: Vec<String>,
    pub metrics: Metrics,
    pub relative_accuracy: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    /// `key=value` pairs written as leading comment lines.
    pub meta: Vec<(String, String)>,
    pub axes: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(s, "# {k}={v}");
        }
        let relative = self.rows.iter().any(|r| r.relative_accuracy.is_some());
        let mut header = self.axes.clone();
        header.extend(["mae", "rmse", "valid_count", "invalid_pred", "dropped_warps"].map(String::from));
        if relative {
            header.push("relative_accuracy".into());
        }
        let _ = writeln!(s, "{}", header.join(","));
        for r in &self.rows {
            let mut cols = r.params.clone();
            cols.push(format_g6(r.metrics.mae));
            cols.push(format_g6(r.metrics.rmse));
            cols.push(r.metrics.valid_count.to_string());
            cols.push(r.metrics.invalid_pred.to_string());
            cols.push(r.metrics.dropped_warps.to_string());
            if relative {
                cols.push(r.relative_accuracy.map(format_g6).unwrap_or_default());
            }
            let _ = writeln!(s, "{}", cols.join(","));
        }
        s
    }
}

/// `%g`-style rendering with 6 significant digits.
pub fn format_g6(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        trim_zeros(format!("{:.*}", (5 - exp) as usize, v))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn check_samples<T: Real>(samples: &[Sample<T>]) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::Input("no samples to evaluate".into()));
    }
    let mut seen = BTreeSet::new();
    for s in samples {
        if !seen.insert(s.id.as_str()) {
            return Err(Error::Input(format!("duplicate sample id `{}`", s.id)));
        }
    }
    Ok(())
}

/// Run the pipeline over all samples in parallel; results keep sample order.
pub fn run_samples<T: Real, M: StereoMatcher<T> + ?Sized>(
    samples: &[Sample<T>],
    cfg: &PipelineConfig<T>,
    matcher: &M,
    seed: u64,
) -> Result<Vec<Metrics>> {
    check_samples(samples)?;
    samples
        .par_iter()
        .map(|s| complete(s, cfg, matcher, derive_seed(seed, &s.id), false).map(|c| c.metrics))
        .collect()
}

fn base_meta<T: Real>(cfg: &PipelineConfig<T>, samples: usize, seed: u64, matcher: String) -> Vec<(String, String)> {
    let p = &cfg.pattern;
    vec![
        ("seed".into(), seed.to_string()),
        ("samples".into(), samples.to_string()),
        ("matcher".into(), matcher),
        ("mode".into(), p.mode.to_string()),
        ("baseline_b".into(), cfg.rig.baseline.to_string()),
        ("sigma_xy".into(), p.sigma_xy.to_string()),
        ("sigma_i".into(), p.sigma_i.to_string()),
        ("t_adpt".into(), p.t_adpt.to_string()),
    ]
}

/// One row per grid cell, averaged over samples.
pub fn sweep_patches<T: Real, M: StereoMatcher<T> + ?Sized>(
    samples: &[Sample<T>],
    cfg: &PipelineConfig<T>,
    matcher: &M,
    cells: &[PatchCell],
    seed: u64,
) -> Result<SweepReport> {
    if cells.is_empty() {
        return Err(Error::Config("empty patch grid".into()));
    }
    let mut rows = Vec::with_capacity(cells.len());
    for cell in cells {
        let cell_cfg = PipelineConfig {
            pattern: cell.apply(&cfg.pattern),
            ..*cfg
        };
        let metrics = summarize(&run_samples(samples, &cell_cfg, matcher, seed)?);
        rows.push(SweepRow {
            params: vec![
                cell.patch_size.to_string(),
                cell.adaptive.map_or("-".into(), |a| a.to_string()),
                cell.padding.to_string(),
            ],
            metrics,
            relative_accuracy: None,
        });
    }
    Ok(SweepReport {
        meta: base_meta(cfg, samples.len(), seed, matcher.name()),
        axes: vec!["patch_size".into(), "adaptive".into(), "padding".into()],
        rows,
    })
}

/// One row per baseline with relative accuracy `min MAE / MAE(b)`.
pub fn sweep_baseline<T: Real, M: StereoMatcher<T> + ?Sized>(
    samples: &[Sample<T>],
    cfg: &PipelineConfig<T>,
    matcher: &M,
    baselines: &[T],
    seed: u64,
) -> Result<SweepReport> {
    if baselines.is_empty() {
        return Err(Error::Config("no baselines to sweep".into()));
    }
    let mut rows = Vec::with_capacity(baselines.len());
    for &b in baselines {
        let b_cfg = PipelineConfig {
            rig: cfg.rig.with_baseline(b)?,
            ..*cfg
        };
        let metrics = summarize(&run_samples(samples, &b_cfg, matcher, seed)?);
        rows.push(SweepRow {
            params: vec![b.to_string()],
            metrics,
            relative_accuracy: None,
        });
    }
    let best = rows.iter().map(|r| r.metrics.mae).fold(f64::INFINITY, f64::min);
    for r in &mut rows {
        r.relative_accuracy = Some(relative_accuracy(best, r.metrics.mae));
    }
    let mut meta = base_meta(cfg, samples.len(), seed, matcher.name());
    meta.retain(|(k, _)| k != "baseline_b");
    meta.push(("patch_size".into(), cfg.pattern.patch_size.to_string()));
    meta.push(("adaptive".into(), cfg.pattern.adaptive.to_string()));
    meta.push(("padding".into(), cfg.pattern.left_padding.to_string()));
    Ok(SweepReport {
        meta,
        axes: vec!["baseline_b".into()],
        rows,
    })
}

/// `best / mae`, exactly 1 where `mae` is the minimum.
pub fn relative_accuracy(best: f64, mae: f64) -> f64 {
    if mae == best {
        1.0
    } else {
        best / mae
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_has_eighteen_cells() {
        let g = patch_grid();
        assert_eq!(g.len(), 18);
        assert_eq!(g.iter().filter(|c| c.patch_size == 1).count(), 2);
        assert!(g.iter().filter(|c| c.patch_size == 1).all(|c| c.adaptive.is_none()));
        for s in [3, 5, 7, 9] {
            assert_eq!(g.iter().filter(|c| c.patch_size == s).count(), 4);
        }
    }

    #[test]
    fn g6_formatting() {
        assert_eq!(format_g6(0.5), "0.5");
        assert_eq!(format_g6(1.0), "1");
        assert_eq!(format_g6(0.123456789), "0.123457");
        assert_eq!(format_g6(123456.7), "123457");
        assert_eq!(format_g6(1234567.0), "1.23457e+06");
        assert_eq!(format_g6(0.0001), "0.0001");
        assert_eq!(format_g6(0.00001234), "1.234e-05");
        assert_eq!(format_g6(-2.5), "-2.5");
        assert_eq!(format_g6(999999.5), "1e+06");
        assert_eq!(format_g6(0.0), "0");
    }

    #[test]
    fn relative_accuracy_peaks_at_best() {
        assert_eq!(relative_accuracy(0.2, 0.2), 1.0);
        assert_eq!(relative_accuracy(0.2, 0.4), 0.5);
        assert_eq!(relative_accuracy(0.0, 0.0), 1.0);
    }
}
