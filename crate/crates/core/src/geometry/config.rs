//! Camera intrinsics file.
//!
//! One camera per file, one `key = value` pair per line. Blank lines and
//! anything after `#` are ignored. Keys:
//!
//! | key | required | meaning |
//! |-----|----------|---------|
//! | `fx`, `fy` | yes | focal lengths, pixels, > 0 |
//! | `ox`, `oy` | yes | principal point, pixels |
//! | `image_width`, `image_height` | yes | image size, pixels, > 0 |
//! | `k1`, `k2`, `k3`, `p1`, `p2` | no (default 0) | distortion coefficients |
//!
//! Unknown or repeated keys are errors.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{DistortionParams, GeometryError, IntrinsicMatrix};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing required key `{0}`")]
    MissingKey(&'static str),
    #[error(transparent)]
    Invalid(#[from] GeometryError),
}

const KEYS: [&str; 11] = ["fx", "fy", "ox", "oy", "k1", "k2", "k3", "p1", "p2", "image_width", "image_height"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraConfig {
    pub intrinsics: IntrinsicMatrix,
    #[serde(default)]
    pub distortion: DistortionParams,
    pub image_width: u32,
    pub image_height: u32,
}

impl CameraConfig {
    /// Intrinsics usable for projection. Fails with `NotSupported` when the
    /// file carries non-zero distortion.
    pub fn pinhole(&self) -> Result<IntrinsicMatrix, GeometryError> {
        self.distortion.ensure_identity()?;
        Ok(self.intrinsics)
    }
}

impl FromStr for CameraConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut values: BTreeMap<&'static str, f64> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let syntax = |message: String| ConfigError::Syntax { line, message };
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| syntax(format!("expected `key = value`, got `{content}`")))?;
            let key = key.trim();
            let key = *KEYS.iter().find(|k| **k == key).ok_or_else(|| syntax(format!("unknown key `{key}`")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| syntax(format!("`{}` is not a number", value.trim())))?;
            if !value.is_finite() {
                return Err(syntax(format!("`{key}` must be finite")));
            }
            if values.insert(key, value).is_some() {
                return Err(syntax(format!("duplicate key `{key}`")));
            }
        }

        let req = |key: &'static str| values.get(key).copied().ok_or(ConfigError::MissingKey(key));
        let opt = |key: &'static str| values.get(key).copied().unwrap_or(0.0);
        let dim = |key: &'static str| -> Result<u32, ConfigError> {
            let v = req(key)?;
            if v < 1.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
                return Err(GeometryError::InvalidIntrinsics(format!("{key} must be a positive integer, got {v}")).into());
            }
            Ok(v as u32)
        };

        Ok(CameraConfig {
            intrinsics: IntrinsicMatrix::new(req("fx")?, req("fy")?, req("ox")?, req("oy")?)?,
            distortion: DistortionParams { k1: opt("k1"), k2: opt("k2"), p1: opt("p1"), p2: opt("p2"), k3: opt("k3") },
            image_width: dim("image_width")?,
            image_height: dim("image_height")?,
        })
    }
}

impl fmt::Display for CameraConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = &self.intrinsics;
        let d = &self.distortion;
        writeln!(f, "fx = {}", k.fx)?;
        writeln!(f, "fy = {}", k.fy)?;
        writeln!(f, "ox = {}", k.ox)?;
        writeln!(f, "oy = {}", k.oy)?;
        writeln!(f, "k1 = {}", d.k1)?;
        writeln!(f, "k2 = {}", d.k2)?;
        writeln!(f, "k3 = {}", d.k3)?;
        writeln!(f, "p1 = {}", d.p1)?;
        writeln!(f, "p2 = {}", d.p2)?;
        writeln!(f, "image_width = {}", self.image_width)?;
        writeln!(f, "image_height = {}", self.image_height)
    }
}
