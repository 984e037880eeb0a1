//! Out-of-process matchers driven through files.
//!
//! For each call the pipeline writes into a working directory:
//!
//! * `reference.png`, `target.png`: the patterned pair, 8-bit RGB;
//! * `pair.txt`: the sidecar (`pad_left`, `baseline_b`, `f`, `seed`, `width`, `height`);
//! * `gt.pfm`: ground-truth depth, only when the command asks for `{gt}`.
//!
//! The command runs with `{ref}`, `{tgt}`, `{sidecar}`, `{out}`, `{gt}` and `{id}`
//! substituted; if none of the first four placeholders appear, the four paths
//! are appended in that order. It must write a single-channel little-endian PFM
//! of the padded pair's size to `{out}` and exit with status zero.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::Command;

use crate::dataset::pfm::{read_map_pfm, write_map_pfm, MaskStats};
use crate::dataset::png_io::write_rgb_png;
use crate::error::{Error, Result};
use crate::pattern::PatternedStereoPair;
use crate::raster::DisparityMap;
use crate::scalar::Real;
use crate::sgm::{MatchContext, StereoMatcher};

pub const REFERENCE_FILE: &str = "reference.png";
pub const TARGET_FILE: &str = "target.png";
pub const SIDECAR_FILE: &str = "pair.txt";
pub const OUTPUT_FILE: &str = "disparity.pfm";
pub const GT_FILE: &str = "gt.pfm";

/// Metadata travelling with a patterned pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sidecar<T> {
    pub pad_left: usize,
    pub baseline: T,
    pub focal: T,
    pub seed: u64,
    /// Padded pair size.
    pub width: usize,
    pub height: usize,
    /// Largest projected disparity, a hint for sizing the search range.
    pub max_disparity: Option<T>,
}

impl<T: Real> Sidecar<T> {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "pad_left = {}", self.pad_left);
        let _ = writeln!(s, "baseline_b = {}", self.baseline);
        let _ = writeln!(s, "f = {}", self.focal);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "width = {}", self.width);
        let _ = writeln!(s, "height = {}", self.height);
        if let Some(d) = self.max_disparity {
            let _ = writeln!(s, "max_disparity = {d}");
        }
        s
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut kv = BTreeMap::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::format(path, format!("bad sidecar line `{line}`")))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        fn get<V: std::str::FromStr>(kv: &BTreeMap<String, String>, k: &str, path: &Path) -> Result<V> {
            kv.get(k)
                .ok_or_else(|| Error::format(path, format!("sidecar lacks `{k}`")))?
                .parse()
                .map_err(|_| Error::format(path, format!("sidecar `{k}` is malformed")))
        }
        Ok(Self {
            pad_left: get(&kv, "pad_left", path)?,
            baseline: get(&kv, "baseline_b", path)?,
            focal: get(&kv, "f", path)?,
            seed: get(&kv, "seed", path)?,
            width: get(&kv, "width", path)?,
            height: get(&kv, "height", path)?,
            max_disparity: match kv.contains_key("max_disparity") {
                true => Some(get(&kv, "max_disparity", path)?),
                false => None,
            },
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }
}

/// Write both views and the sidecar into `dir`.
pub fn write_pair<T: Real>(dir: &Path, pair: &PatternedStereoPair<T>, sidecar: &Sidecar<T>) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_rgb_png(dir.join(REFERENCE_FILE), &pair.reference)?;
    write_rgb_png(dir.join(TARGET_FILE), &pair.target)?;
    let p = dir.join(SIDECAR_FILE);
    std::fs::write(&p, sidecar.to_text()).map_err(|e| Error::io(p, e))
}

/// Descriptor of an external matcher: a command template and the directory
/// where exchange files are written (one subdirectory per sample id).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExternalMatcher {
    pub command: Vec<String>,
    pub workdir: PathBuf,
}

impl ExternalMatcher {
    pub fn new(command: Vec<String>, workdir: impl Into<PathBuf>) -> Result<Self> {
        if command.is_empty() {
            return Err(Error::Config("external matcher command is empty".into()));
        }
        Ok(Self {
            command,
            workdir: workdir.into(),
        })
    }

    /// Split a command line on whitespace.
    pub fn from_command_line(line: &str, workdir: impl Into<PathBuf>) -> Result<Self> {
        Self::new(line.split_whitespace().map(String::from).collect(), workdir)
    }

    fn wants(&self, placeholder: &str) -> bool {
        self.command.iter().any(|a| a.contains(placeholder))
    }

    /// Run the command on `pair` and read back its disparity.
    pub fn run<T: Real>(
        &self,
        pair: &PatternedStereoPair<T>,
        ctx: &MatchContext<'_, T>,
    ) -> Result<(DisparityMap<T>, MaskStats)> {
        let dir = self.workdir.join(if ctx.id.is_empty() { "pair" } else { ctx.id });
        let sidecar = Sidecar {
            pad_left: pair.pad_left,
            baseline: ctx.rig.baseline,
            focal: ctx.rig.focal(),
            seed: ctx.seed,
            width: pair.width(),
            height: pair.height(),
            max_disparity: pair.reference_disparity.max_valid(),
        };
        write_pair(&dir, pair, &sidecar)?;
        let out = dir.join(OUTPUT_FILE);
        if out.exists() {
            std::fs::remove_file(&out).map_err(|e| Error::io(&out, e))?;
        }
        let gt = dir.join(GT_FILE);
        if self.wants("{gt}") {
            let map = ctx
                .gt
                .ok_or_else(|| Error::Config("matcher command uses {gt} but the sample has none".into()))?;
            write_map_pfm(&gt, map)?;
        }
        let paths = [
            ("{ref}", dir.join(REFERENCE_FILE)),
            ("{tgt}", dir.join(TARGET_FILE)),
            ("{sidecar}", dir.join(SIDECAR_FILE)),
            ("{out}", out.clone()),
        ];
        let explicit = paths.iter().any(|(k, _)| self.wants(k));
        let subst = |arg: &str| -> String {
            let mut a = arg.to_string();
            for (k, p) in &paths {
                a = a.replace(k, &p.to_string_lossy());
            }
            a.replace("{gt}", &gt.to_string_lossy()).replace("{id}", ctx.id)
        };
        let mut cmd = Command::new(subst(&self.command[0]));
        cmd.args(self.command[1..].iter().map(|a| subst(a)));
        if !explicit {
            cmd.args(paths.iter().map(|(_, p)| p));
        }
        let output = cmd
            .output()
            .map_err(|e| Error::Matcher(format!("cannot start `{}`: {e}", self.command[0])))?;
        if !output.status.success() {
            let stderr = String::from_utf8_lossy(&output.stderr);
            let stderr = stderr.trim();
            return Err(Error::Matcher(format!(
                "`{}` failed ({}){}{}",
                self.command[0],
                output.status,
                if stderr.is_empty() { "" } else { ": " },
                stderr
            )));
        }
        if !out.exists() {
            return Err(Error::Matcher(format!(
                "`{}` did not write {}",
                self.command[0],
                out.display()
            )));
        }
        let (map, stats) = read_map_pfm::<T, _>(&out)
            .map_err(|e| Error::Matcher(format!("unreadable matcher output: {e}")))?;
        if map.width() != pair.width() || map.height() != pair.height() {
            return Err(Error::Matcher(format!(
                "matcher output is {}x{}, expected {}x{}",
                map.width(),
                map.height(),
                pair.width(),
                pair.height()
            )));
        }
        Ok((map, stats))
    }
}

impl<T: Real> StereoMatcher<T> for ExternalMatcher {
    fn compute(&self, pair: &PatternedStereoPair<T>, ctx: &MatchContext<'_, T>) -> Result<DisparityMap<T>> {
        self.run(pair, ctx).map(|(m, _)| m)
    }

    fn name(&self) -> String {
        format!("external:{}", self.command.join(" "))
    }
}
