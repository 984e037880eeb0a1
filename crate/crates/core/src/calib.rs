//! Plain-text calibration file.
//!
//! One `key = value` per line, `#` starts a comment. All keys are required and
//! unknown keys are rejected:
//!
//! ```text
//! fx = 300
//! fy = 300
//! cx = 160
//! cy = 120
//! width = 320
//! height = 240
//! baseline_b = 0.15
//! # depth sensor -> camera, 3x4 [R|t] row-major
//! extrinsic = 1 0 0 0  0 1 0 0  0 0 1 0
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{CameraModel, RigidTransform, VirtualRig};
use crate::scalar::Real;

const KEYS: [&str; 8] = [
    "fx",
    "fy",
    "cx",
    "cy",
    "width",
    "height",
    "baseline_b",
    "extrinsic",
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Calibration<T> {
    pub rig: VirtualRig<T>,
    pub extrinsic: RigidTransform<T>,
}

impl<T: Real> Calibration<T> {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Format { msg, .. } => Error::format(path, msg),
            Error::Config(msg) => Error::format(path, msg),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::format("<calibration>", msg);
        let mut entries = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("line {}: expected `key = value`", n + 1)))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(bad(format!("line {}: unknown key `{key}`", n + 1)));
            }
            if entries.insert(key, value.trim()).is_some() {
                return Err(bad(format!("line {}: duplicate key `{key}`", n + 1)));
            }
        }
        if let Some(missing) = KEYS.iter().find(|k| !entries.contains_key(*k)) {
            return Err(bad(format!("missing key `{missing}`")));
        }
        let num = |k: &str| -> Result<T> {
            entries[k]
                .parse::<T>()
                .map_err(|_| bad(format!("`{k}` is not a number: {}", entries[k])))
        };
        let int = |k: &str| -> Result<usize> {
            entries[k]
                .parse::<usize>()
                .map_err(|_| bad(format!("`{k}` is not a non-negative integer: {}", entries[k])))
        };
        let ext: Vec<T> = entries["extrinsic"]
            .split_whitespace()
            .map(|s| s.parse::<T>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad("`extrinsic` must hold 12 numbers".into()))?;
        let ext: [T; 12] = ext
            .try_into()
            .map_err(|v: Vec<T>| bad(format!("`extrinsic` must hold 12 numbers, got {}", v.len())))?;

        let camera = CameraModel::new(
            num("fx")?,
            num("fy")?,
            num("cx")?,
            num("cy")?,
            int("width")?,
            int("height")?,
        )?;
        let rig = VirtualRig::new(camera, num("baseline_b")?)?;
        let extrinsic = RigidTransform::from_row_major(&ext)?;
        Ok(Self { rig, extrinsic })
    }

    /// Serialize; values print in shortest round-trip form.
    pub fn to_text(&self) -> String {
        let c = &self.rig.camera;
        let mut s = String::new();
        let _ = writeln!(s, "fx = {}", c.fx);
        let _ = writeln!(s, "fy = {}", c.fy);
        let _ = writeln!(s, "cx = {}", c.cx);
        let _ = writeln!(s, "cy = {}", c.cy);
        let _ = writeln!(s, "width = {}", c.width);
        let _ = writeln!(s, "height = {}", c.height);
        let _ = writeln!(s, "baseline_b = {}", self.rig.baseline);
        let ext: Vec<String> = self
            .extrinsic
            .to_row_major()
            .iter()
            .map(|v| v.to_string())
            .collect();
        let _ = writeln!(s, "extrinsic = {}", ext.join(" "));
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}
