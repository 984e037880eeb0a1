//! The `vpp` command line.
//!
//! Settings resolve as flag > `--config` JSON file > built-in default, and the
//! effective settings are written to `config.json` in every output directory.
//! Exit codes: 0 success, 2 usage or configuration, 3 I/O or bad data,
//! 4 matcher failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calib::Calibration;
use crate::dataset::pfm::{read_map_pfm, write_map_pfm};
use crate::dataset::png_io::read_rgb_png;
use crate::dataset::{load_depth, read_manifest, save_depth, synthetic_samples, write_manifest, Sample};
use crate::error::{Error, Result};
use crate::eval::{
    complete, evaluate, patch_grid, plot_relative_accuracy, summarize, sweep_baseline, sweep_patches,
    InvalidPolicy, Metrics, PipelineConfig,
};
use crate::geometry::{depth_to_disparity, CameraModel, VirtualRig};
use crate::pattern::{project, PatternConfig, PatternMode};
use crate::seed::derive_seed;
use crate::sgm::external::{write_pair, Sidecar};
use crate::sgm::{ExternalMatcher, MatcherConfig, SgmMatcher, StereoMatcher};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_MATCHER: u8 = 4;

type F = f32;

#[derive(Parser, Debug)]
#[command(name = "vpp", version, about = "Depth completion by virtual pattern projection")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic dataset with manifest and calibration.
    Synth(SynthArgs),
    /// Write the patterned stereo pair of each sample.
    Project(ProjectArgs),
    /// Run the built-in matcher on a pair written by `project`.
    Match(MatchArgs),
    /// Densify every sample and score it.
    Complete(CompleteArgs),
    /// Score predicted depth against ground truth.
    Eval(EvalArgs),
    /// Sweep patch settings or virtual baselines.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 10)]
    scenes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sparse points per sample; all ground-truth pixels when omitted.
    #[arg(long)]
    points: Option<usize>,
    /// Camera and baseline; a 320x240 rig with f = 300 px, b = 0.15 m when omitted.
    #[arg(long)]
    calib: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    z_min: f64,
    #[arg(long, default_value_t = 5.0)]
    z_max: f64,
    #[arg(long)]
    force: bool,
}

#[derive(Args, Debug, Clone)]
struct DataArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    calib: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// JSON settings file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    force: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Virtual baseline in meters, overriding the calibration file.
    #[arg(long)]
    baseline: Option<f64>,
}

#[derive(Args, Debug, Default, Clone)]
struct PatternArgs {
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Odd patch side length.
    #[arg(long)]
    patch: Option<usize>,
    #[arg(long, overrides_with = "no_adaptive")]
    adaptive: bool,
    #[arg(long)]
    no_adaptive: bool,
    /// Left padding.
    #[arg(long, overrides_with = "no_pad")]
    pad: bool,
    #[arg(long)]
    no_pad: bool,
    #[arg(long)]
    sigma_xy: Option<f64>,
    #[arg(long)]
    sigma_i: Option<f64>,
    #[arg(long)]
    t_adpt: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Rgb,
    Random,
}

#[derive(Args, Debug, Default, Clone)]
struct MatcherArgs {
    #[arg(long, value_enum)]
    matcher: Option<MatcherKind>,
    /// External matcher command line; placeholders {ref} {tgt} {sidecar} {out} {gt} {id}.
    #[arg(long)]
    cmd: Option<String>,
    #[arg(long)]
    max_disparity: Option<usize>,
    #[arg(long)]
    census_window: Option<usize>,
    #[arg(long)]
    p1: Option<u32>,
    #[arg(long)]
    p2: Option<u32>,
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long, overrides_with = "no_subpixel")]
    subpixel: bool,
    #[arg(long)]
    no_subpixel: bool,
    /// Left-right check threshold in pixels.
    #[arg(long)]
    lr_check: Option<f64>,
    /// `exclude` or `penalty:<meters>`.
    #[arg(long)]
    policy: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum MatcherKind {
    Sgm,
    External,
}

#[derive(Args, Debug)]
struct ProjectArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    pattern: PatternArgs,
}

#[derive(Args, Debug)]
struct MatchArgs {
    reference: PathBuf,
    target: PathBuf,
    sidecar: PathBuf,
    out: PathBuf,
    #[command(flatten)]
    matcher: MatcherArgs,
}

#[derive(Args, Debug)]
struct CompleteArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    pattern: PatternArgs,
    #[command(flatten)]
    matcher: MatcherArgs,
    /// Also write patterned pairs and disparities.
    #[arg(long)]
    keep_intermediates: bool,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long, conflicts_with = "manifest", requires = "gt")]
    pred: Option<PathBuf>,
    #[arg(long)]
    gt: Option<PathBuf>,
    #[arg(long, requires = "pred_dir")]
    manifest: Option<PathBuf>,
    /// Directory of `<id>.pfm` predictions.
    #[arg(long)]
    pred_dir: Option<PathBuf>,
    /// `exclude` or `penalty:<meters>`.
    #[arg(long, default_value = "exclude")]
    policy: String,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Axis {
    Patch,
    Baseline,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    pattern: PatternArgs,
    #[command(flatten)]
    matcher: MatcherArgs,
    #[arg(long, value_enum)]
    axis: Axis,
    /// Comma-separated patch sizes or baselines.
    #[arg(long, value_delimiter = ',')]
    values: Vec<f64>,
    /// Render relative accuracy against baseline as a PNG.
    #[arg(long)]
    plot: bool,
}

/// Every tunable; unset fields fall through to the next source.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub mode: Option<String>,
    pub patch_size: Option<usize>,
    pub adaptive: Option<bool>,
    pub padding: Option<bool>,
    pub sigma_xy: Option<f64>,
    pub sigma_i: Option<f64>,
    pub t_adpt: Option<f64>,
    pub seed: Option<u64>,
    pub baseline_b: Option<f64>,
    pub matcher: Option<String>,
    pub command: Option<String>,
    pub max_disparity: Option<usize>,
    pub census_window: Option<usize>,
    pub p1: Option<u32>,
    pub p2: Option<u32>,
    pub num_paths: Option<usize>,
    pub subpixel: Option<bool>,
    pub lr_check: Option<f64>,
    pub policy: Option<String>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($f:ident),*) => {
        Settings { $($f: $top.$f.or($base.$f)),* }
    };
}

impl Settings {
    /// Fields of `top` win over `self`.
    pub fn overlay(self, top: Settings) -> Settings {
        overlay!(
            self, top, mode, patch_size, adaptive, padding, sigma_xy, sigma_i, t_adpt, seed, baseline_b,
            matcher, command, max_disparity, census_window, p1, p2, num_paths, subpixel, lr_check, policy
        )
    }

    pub fn load(path: &Path) -> Result<Settings> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.into(),
            source: e,
        })?;
        serde_json::from_str(&text).map_err(|e| Error::Format {
            path: path.into(),
            msg: e.to_string(),
        })
    }

    fn pattern(&self) -> Result<PatternConfig<F>> {
        let d = PatternConfig::<F>::default();
        let cfg = PatternConfig {
            mode: match &self.mode {
                Some(m) => m.parse()?,
                None => d.mode,
            },
            patch_size: self.patch_size.unwrap_or(d.patch_size),
            adaptive: self.adaptive.unwrap_or(d.adaptive),
            left_padding: self.padding.unwrap_or(d.left_padding),
            sigma_xy: self.sigma_xy.map_or(d.sigma_xy, |v| v as F),
            sigma_i: self.sigma_i.map_or(d.sigma_i, |v| v as F),
            t_adpt: self.t_adpt.map_or(d.t_adpt, |v| v as F),
            rng_seed: self.seed.unwrap_or(0),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn matcher_config(&self) -> Result<MatcherConfig> {
        let d = MatcherConfig::default();
        let cfg = MatcherConfig {
            max_disparity: self.max_disparity.or(d.max_disparity),
            census_window: self.census_window.unwrap_or(d.census_window),
            p1: self.p1.or(d.p1),
            p2: self.p2.or(d.p2),
            num_paths: self.num_paths.unwrap_or(d.num_paths),
            subpixel: self.subpixel.unwrap_or(d.subpixel),
            lr_threshold: self.lr_check.or(d.lr_threshold),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn matcher_kind(&self) -> Result<MatcherKind> {
        match (self.matcher.as_deref(), &self.command) {
            (None, None) | (Some("sgm"), None) => Ok(MatcherKind::Sgm),
            (None, Some(_)) | (Some("external"), Some(_)) => Ok(MatcherKind::External),
            (Some("external"), None) => Err(Error::Config("the external matcher needs --cmd".into())),
            (Some("sgm"), Some(_)) => Err(Error::Config(
                "--cmd given with the built-in matcher; choose one matcher".into(),
            )),
            (Some(other), _) => Err(Error::Config(format!("unknown matcher `{other}`"))),
        }
    }

    fn policy(&self) -> Result<InvalidPolicy> {
        parse_policy(self.policy.as_deref().unwrap_or("exclude"))
    }

    /// Fill every field with the value actually used.
    fn effective(&self, rig: &VirtualRig<F>) -> Result<Settings> {
        let p = self.pattern()?;
        let m = self.matcher_config()?;
        let kind = self.matcher_kind()?;
        let pen = m.penalties();
        Ok(Settings {
            mode: Some(p.mode.to_string()),
            patch_size: Some(p.patch_size),
            adaptive: Some(p.adaptive),
            padding: Some(p.left_padding),
            sigma_xy: Some(widen(p.sigma_xy)),
            sigma_i: Some(widen(p.sigma_i)),
            t_adpt: Some(widen(p.t_adpt)),
            seed: Some(p.rng_seed),
            baseline_b: Some(widen(rig.baseline)),
            matcher: Some(if kind == MatcherKind::Sgm { "sgm" } else { "external" }.into()),
            command: self.command.clone(),
            max_disparity: m.max_disparity,
            census_window: Some(m.census_window),
            p1: Some(pen.p1),
            p2: Some(pen.p2),
            num_paths: Some(m.num_paths),
            subpixel: Some(m.subpixel),
            lr_check: m.lr_threshold,
            policy: Some(self.policy.clone().unwrap_or_else(|| "exclude".into())),
        })
    }
}

/// `f32` to the `f64` with the same shortest decimal form.
fn widen(v: F) -> f64 {
    v.to_string().parse().expect("float display parses")
}

fn parse_policy(s: &str) -> Result<InvalidPolicy> {
    match s.split_once(':') {
        None if s == "exclude" => Ok(InvalidPolicy::Exclude),
        Some(("penalty", v)) => v
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite() && *v >= 0.0)
            .map(InvalidPolicy::Penalty)
            .ok_or_else(|| Error::Config(format!("bad penalty `{v}`"))),
        _ => Err(Error::Config(format!(
            "policy must be `exclude` or `penalty:<meters>`, got `{s}`"
        ))),
    }
}

fn flag_pair(on: bool, off: bool) -> Option<bool> {
    match (on, off) {
        (true, _) => Some(true),
        (_, true) => Some(false),
        _ => None,
    }
}

impl PatternArgs {
    fn settings(&self) -> Settings {
        Settings {
            mode: self.mode.map(|m| match m {
                ModeArg::Rgb => PatternMode::Rgb.to_string(),
                ModeArg::Random => PatternMode::Random.to_string(),
            }),
            patch_size: self.patch,
            adaptive: flag_pair(self.adaptive, self.no_adaptive),
            padding: flag_pair(self.pad, self.no_pad),
            sigma_xy: self.sigma_xy,
            sigma_i: self.sigma_i,
            t_adpt: self.t_adpt,
            ..Settings::default()
        }
    }
}

impl MatcherArgs {
    fn settings(&self) -> Settings {
        Settings {
            matcher: self.matcher.map(|k| match k {
                MatcherKind::Sgm => "sgm".into(),
                MatcherKind::External => "external".into(),
            }),
            command: self.cmd.clone(),
            max_disparity: self.max_disparity,
            census_window: self.census_window,
            p1: self.p1,
            p2: self.p2,
            num_paths: self.paths,
            subpixel: flag_pair(self.subpixel, self.no_subpixel),
            lr_check: self.lr_check,
            policy: self.policy.clone(),
            ..Settings::default()
        }
    }
}

/// Everything a data-driven command needs once settings are resolved.
struct Run {
    settings: Settings,
    rig: VirtualRig<F>,
    samples: Vec<Sample<F>>,
    out: PathBuf,
}

impl Run {
    fn prepare(data: &DataArgs, flags: Settings) -> Result<Run> {
        let file = match &data.config {
            Some(p) => Settings::load(p)?,
            None => Settings::default(),
        };
        let mut settings = file.overlay(flags).overlay(Settings {
            seed: data.seed,
            baseline_b: data.baseline,
            ..Settings::default()
        });
        let calib = Calibration::<F>::load(&data.calib)?;
        let rig = match settings.baseline_b {
            Some(b) => calib.rig.with_baseline(b as F)?,
            None => calib.rig,
        };
        settings = settings.effective(&rig)?;
        let entries = read_manifest(&data.manifest)?;
        if entries.is_empty() {
            return Err(Error::Input(format!(
                "manifest {} lists no samples",
                data.manifest.display()
            )));
        }
        let samples = entries
            .par_iter()
            .map(|e| e.load::<F>())
            .collect::<Result<Vec<_>>>()?;
        prepare_out(&data.out, data.force)?;
        write_effective(&data.out, &settings)?;
        Ok(Run {
            settings,
            rig,
            samples,
            out: data.out.clone(),
        })
    }

    fn pipeline(&self) -> Result<PipelineConfig<F>> {
        Ok(PipelineConfig {
            rig: self.rig,
            pattern: self.settings.pattern()?,
            policy: self.settings.policy()?,
        })
    }

    fn seed(&self) -> u64 {
        self.settings.seed.unwrap_or(0)
    }

    fn matcher(&self) -> Result<Box<dyn StereoMatcher<F>>> {
        Ok(match self.settings.matcher_kind()? {
            MatcherKind::Sgm => Box::new(SgmMatcher::new(self.settings.matcher_config()?)?),
            MatcherKind::External => Box::new(ExternalMatcher::from_command_line(
                self.settings.command.as_deref().unwrap_or_default(),
                self.out.join("exchange"),
            )?),
        })
    }
}

/// Refuse to reuse a non-empty directory unless `force`, in which case it is
/// cleared first.
fn prepare_out(dir: &Path, force: bool) -> Result<()> {
    let io = |e| Error::Io {
        path: dir.into(),
        source: e,
    };
    if dir.exists() {
        let non_empty = std::fs::read_dir(dir).map_err(io)?.next().is_some();
        if non_empty {
            if !force {
                return Err(Error::Config(format!(
                    "output directory {} is not empty; pass --force to replace it",
                    dir.display()
                )));
            }
            std::fs::remove_dir_all(dir).map_err(io)?;
        }
    }
    std::fs::create_dir_all(dir).map_err(io)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.into(),
        source: e,
    })
}

fn write_effective(dir: &Path, settings: &Settings) -> Result<()> {
    let json = serde_json::to_string_pretty(settings).expect("settings serialize");
    write_text(&dir.join("config.json"), &(json + "\n"))
}

fn mkdir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.into(),
        source: e,
    })
}

fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let calib = match &a.calib {
        Some(p) => Calibration::<F>::load(p)?,
        None => Calibration {
            rig: VirtualRig::new(CameraModel::new(300.0, 300.0, 160.0, 120.0, 320, 240)?, 0.15)?,
            extrinsic: crate::geometry::RigidTransform::identity(),
        },
    };
    if !(a.z_min > 0.0 && a.z_max > a.z_min) {
        return Err(Error::Config(format!("bad depth range [{}, {}]", a.z_min, a.z_max)));
    }
    let samples = synthetic_samples(&calib.rig, a.scenes, a.points, (a.z_min, a.z_max), a.seed)?;
    prepare_out(&a.out, a.force)?;
    for sub in ["rgb", "sparse", "gt"] {
        mkdir(&a.out.join(sub))?;
    }
    calib.save(a.out.join("calib.txt"))?;
    let mut rows = Vec::with_capacity(samples.len());
    for s in &samples {
        let (rgb, sparse, gt) = (
            format!("rgb/{}.png", s.id),
            format!("sparse/{}.pfm", s.id),
            format!("gt/{}.pfm", s.id),
        );
        crate::dataset::png_io::write_rgb_png(a.out.join(&rgb), &s.rgb)?;
        save_depth(a.out.join(&sparse), &s.sparse)?;
        save_depth(a.out.join(&gt), &s.gt)?;
        rows.push((s.id.clone(), rgb, sparse, gt));
    }
    write_manifest(a.out.join("manifest.txt"), &rows)?;
    let meta = serde_json::json!({
        "scenes": a.scenes,
        "seed": a.seed,
        "points": a.points,
        "z_min": a.z_min,
        "z_max": a.z_max,
    });
    write_text(&a.out.join("config.json"), &(serde_json::to_string_pretty(&meta).unwrap() + "\n"))
}

fn cmd_project(a: &ProjectArgs) -> Result<()> {
    let run = Run::prepare(&a.data, a.pattern.settings())?;
    let pattern = run.settings.pattern()?;
    run.samples.par_iter().try_for_each(|s| {
        let seed = derive_seed(run.seed(), &s.id);
        let d = depth_to_disparity(&s.sparse, &run.rig)?;
        let pair = project(&s.rgb, &d, &PatternConfig { rng_seed: seed, ..pattern })?;
        let sidecar = Sidecar {
            pad_left: pair.pad_left,
            baseline: run.rig.baseline,
            focal: run.rig.focal(),
            seed,
            width: pair.width(),
            height: pair.height(),
            max_disparity: pair.reference_disparity.max_valid(),
        };
        write_pair(&run.out.join(&s.id), &pair, &sidecar)
    })
}

fn cmd_match(a: &MatchArgs) -> Result<()> {
    let settings = a.matcher.settings();
    if settings.matcher_kind()? != MatcherKind::Sgm {
        return Err(Error::Config("`match` runs the built-in matcher only".into()));
    }
    let cfg = settings.matcher_config()?;
    let sidecar = Sidecar::<F>::load(&a.sidecar)?;
    let reference = read_rgb_png::<F>(&a.reference)?;
    let target = read_rgb_png::<F>(&a.target)?;
    if reference.width() != sidecar.width || reference.height() != sidecar.height {
        return Err(Error::Input(format!(
            "pair is {}x{} but the sidecar says {}x{}",
            reference.width(),
            reference.height(),
            sidecar.width,
            sidecar.height
        )));
    }
    let levels = cfg.levels_for_max(sidecar.max_disparity.map(|d| d as f64));
    let d = SgmMatcher::new(cfg)?.match_images(&reference, &target, levels)?;
    write_map_pfm(&a.out, &d)
}

#[derive(Serialize)]
struct SampleLine<'a> {
    id: &'a str,
    #[serde(flatten)]
    metrics: Metrics,
}

#[derive(Serialize)]
struct SummaryLine {
    summary: bool,
    samples: usize,
    #[serde(flatten)]
    metrics: Metrics,
}

fn cmd_complete(a: &CompleteArgs) -> Result<()> {
    let flags = a.pattern.settings().overlay(a.matcher.settings());
    let run = Run::prepare(&a.data, flags)?;
    let cfg = run.pipeline()?;
    let matcher = run.matcher()?;
    mkdir(&run.out.join("depth"))?;
    let path = run.out.join("metrics.jsonl");
    let io = |e| Error::Io {
        path: path.clone(),
        source: e,
    };
    let mut lines = BufWriter::new(File::create(&path).map_err(io)?);
    let mut all = Vec::with_capacity(run.samples.len());
    let batch = rayon::current_num_threads().max(1);
    for chunk in run.samples.chunks(batch) {
        let results: Vec<_> = chunk
            .par_iter()
            .map(|s| complete(s, &cfg, matcher.as_ref(), derive_seed(run.seed(), &s.id), a.keep_intermediates))
            .collect();
        for (s, r) in chunk.iter().zip(results) {
            let c = match r {
                Ok(c) => c,
                Err(e) => {
                    lines.flush().map_err(io)?;
                    eprintln!("vpp: sample `{}`", s.id);
                    return Err(e);
                }
            };
            save_depth(run.out.join("depth").join(format!("{}.pfm", s.id)), &c.depth)?;
            if let Some(i) = &c.intermediates {
                let dir = run.out.join("intermediates").join(&s.id);
                let sidecar = Sidecar {
                    pad_left: i.pair.pad_left,
                    baseline: run.rig.baseline,
                    focal: run.rig.focal(),
                    seed: derive_seed(run.seed(), &s.id),
                    width: i.pair.width(),
                    height: i.pair.height(),
                    max_disparity: i.pair.reference_disparity.max_valid(),
                };
                write_pair(&dir, &i.pair, &sidecar)?;
                write_map_pfm(dir.join("sparse_disparity.pfm"), &i.sparse_disparity)?;
                write_map_pfm(dir.join("raw_disparity.pfm"), &i.raw_disparity)?;
                write_map_pfm(dir.join("disparity.pfm"), &i.disparity)?;
            }
            let line = serde_json::to_string(&SampleLine {
                id: &s.id,
                metrics: c.metrics,
            })
            .expect("metrics serialize");
            writeln!(lines, "{line}").map_err(io)?;
            all.push(c.metrics);
        }
        lines.flush().map_err(io)?;
    }
    let summary = serde_json::to_string(&SummaryLine {
        summary: true,
        samples: all.len(),
        metrics: summarize(&all),
    })
    .expect("metrics serialize");
    writeln!(lines, "{summary}").map_err(io)?;
    lines.flush().map_err(io)?;
    println!("{summary}");
    Ok(())
}

fn cmd_eval(a: &EvalArgs) -> Result<()> {
    let policy = parse_policy(&a.policy)?;
    let mut all = Vec::new();
    if let (Some(pred), Some(gt)) = (&a.pred, &a.gt) {
        let m = evaluate(&load_depth::<F>(pred)?, &load_depth::<F>(gt)?, policy)?;
        println!("{}", serde_json::to_string(&m).expect("metrics serialize"));
        return Ok(());
    }
    let (Some(manifest), Some(dir)) = (&a.manifest, &a.pred_dir) else {
        return Err(Error::Config("give --pred and --gt, or --manifest and --pred-dir".into()));
    };
    let entries = read_manifest(manifest)?;
    if entries.is_empty() {
        return Err(Error::Input(format!("manifest {} lists no samples", manifest.display())));
    }
    for e in &entries {
        let (pred, _) = read_map_pfm::<F, _>(dir.join(format!("{}.pfm", e.id)))?;
        let m = evaluate(&pred, &load_depth::<F>(&e.gt)?, policy)?;
        let line = SampleLine { id: &e.id, metrics: m };
        println!("{}", serde_json::to_string(&line).expect("metrics serialize"));
        all.push(m);
    }
    let summary = SummaryLine {
        summary: true,
        samples: all.len(),
        metrics: summarize(&all),
    };
    println!("{}", serde_json::to_string(&summary).expect("metrics serialize"));
    Ok(())
}

fn cmd_sweep(a: &SweepArgs) -> Result<()> {
    let flags = a.pattern.settings().overlay(a.matcher.settings());
    let run = Run::prepare(&a.data, flags)?;
    let cfg = run.pipeline()?;
    let matcher = run.matcher()?;
    let report = match a.axis {
        Axis::Patch => {
            let mut cells = patch_grid();
            if !a.values.is_empty() {
                for v in &a.values {
                    if v.fract() != 0.0 || *v < 1.0 || (*v as usize).is_multiple_of(2) {
                        return Err(Error::Config(format!("patch size must be an odd integer, got {v}")));
                    }
                }
                cells.retain(|c| a.values.contains(&(c.patch_size as f64)));
                if cells.is_empty() {
                    return Err(Error::Config("no grid cell matches --values".into()));
                }
            }
            sweep_patches(&run.samples, &cfg, matcher.as_ref(), &cells, run.seed())?
        }
        Axis::Baseline => {
            if a.values.is_empty() {
                return Err(Error::Config("a baseline sweep needs --values".into()));
            }
            let bs: Vec<F> = a.values.iter().map(|&v| v as F).collect();
            let report = sweep_baseline(&run.samples, &cfg, matcher.as_ref(), &bs, run.seed())?;
            if a.plot {
                let pts: Vec<(f64, f64)> = a
                    .values
                    .iter()
                    .zip(&report.rows)
                    .map(|(&b, r)| (b, r.relative_accuracy.unwrap_or(0.0)))
                    .collect();
                plot_relative_accuracy(run.out.join("relative_accuracy.png"), &pts)?;
            }
            report
        }
    };
    let csv = report.to_csv();
    write_text(&run.out.join("sweep.csv"), &csv)?;
    print!("{csv}");
    Ok(())
}

/// Cap the global thread pool from `VPP_THREADS`.
fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("VPP_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::Config(format!("VPP_THREADS must be a positive integer, got `{v}`")))?;
        // a pool built earlier in this process keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

pub fn exit_code(e: &Error) -> u8 {
    match e.root() {
        Error::Config(_) => EXIT_USAGE,
        Error::Matcher(_) => EXIT_MATCHER,
        _ => EXIT_IO,
    }
}

/// Parse `args` and run; returns the process exit code.
pub fn run<I, S>(args: I) -> u8
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Project(a) => cmd_project(a),
        Command::Match(a) => cmd_match(a),
        Command::Complete(a) => cmd_complete(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Sweep(a) => cmd_sweep(a),
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("vpp: {e}");
            exit_code(&e)
        }
    }
}
