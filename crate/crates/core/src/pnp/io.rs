//! Text formats for correspondences and solutions.
//!
//! Correspondence file: one pair per line, `label u v X Y Z`, whitespace
//! separated; `#` starts a comment.
//!
//! Solution file: `key = value` lines with keys `rvec`, `tvec` (three
//! numbers each), `rmse_px`, `iterations`, `converged` and optionally
//! `stop_reason`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use super::{Correspondence, PnpSolution, StopReason};
use crate::geometry::{rodrigues_to_matrix, ExtrinsicTransform, PixelCoord, Point3D, RotationVector};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

fn finite(line: usize, field: &str, text: &str) -> Result<f64, ParseError> {
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(err(line, format!("{field}: `{text}` is not a finite number"))),
    }
}

pub fn parse_correspondences(text: &str) -> Result<Vec<Correspondence>, ParseError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(err(line, format!("expected `label u v X Y Z`, found {} fields", fields.len())));
        }
        let names = ["u", "v", "X", "Y", "Z"];
        let mut nums = [0.0; 5];
        for (i, name) in names.iter().enumerate() {
            nums[i] = finite(line, name, fields[i + 1])?;
        }
        out.push(Correspondence::new(
            fields[0],
            PixelCoord::new(nums[0], nums[1]),
            Point3D::new(nums[2], nums[3], nums[4]),
        ));
    }
    Ok(out)
}

/// Labels containing whitespace or `#` are replaced by `pair<i>`.
pub fn write_correspondences(corrs: &[Correspondence]) -> String {
    let mut out = String::from("# label u v X Y Z\n");
    for (i, c) in corrs.iter().enumerate() {
        let label = if c.label.is_empty() || c.label.contains(|ch: char| ch.is_whitespace() || ch == '#') {
            format!("pair{i}")
        } else {
            c.label.clone()
        };
        let p = c.lidar_point;
        let _ = writeln!(out, "{label} {} {} {} {} {}", c.pixel.u, c.pixel.v, p.x, p.y, p.z);
    }
    out
}

/// Persisted form of a [`PnpSolution`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionFile {
    pub rvec: RotationVector,
    pub tvec: [f64; 3],
    pub rmse_px: f64,
    pub iterations: usize,
    pub converged: bool,
    pub stop_reason: Option<StopReason>,
}

impl SolutionFile {
    pub fn extrinsic(&self) -> ExtrinsicTransform {
        ExtrinsicTransform { rotation: rodrigues_to_matrix(self.rvec), translation: self.tvec }
    }
}

impl From<&PnpSolution> for SolutionFile {
    fn from(s: &PnpSolution) -> Self {
        Self {
            rvec: s.rvec,
            tvec: s.tvec,
            rmse_px: s.rmse_px,
            iterations: s.iterations,
            converged: s.converged,
            stop_reason: Some(s.stop_reason),
        }
    }
}

impl fmt::Display for SolutionFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.rvec;
        let t = self.tvec;
        writeln!(f, "rvec = {} {} {}", r.rx, r.ry, r.rz)?;
        writeln!(f, "tvec = {} {} {}", t[0], t[1], t[2])?;
        writeln!(f, "rmse_px = {}", self.rmse_px)?;
        writeln!(f, "iterations = {}", self.iterations)?;
        writeln!(f, "converged = {}", self.converged)?;
        if let Some(reason) = self.stop_reason {
            writeln!(f, "stop_reason = {}", reason.as_str())?;
        }
        Ok(())
    }
}

impl FromStr for SolutionFile {
    type Err = ParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut kv: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (k, v) = content.split_once('=').ok_or_else(|| err(line, "expected `key = value`"))?;
            let k = k.trim().to_string();
            if !["rvec", "tvec", "rmse_px", "iterations", "converged", "stop_reason"].contains(&k.as_str()) {
                return Err(err(line, format!("unknown key `{k}`")));
            }
            if kv.insert(k.clone(), (line, v.trim().to_string())).is_some() {
                return Err(err(line, format!("duplicate key `{k}`")));
            }
        }
        let last_line = text.lines().count();
        let get = |k: &str| kv.get(k).ok_or_else(|| err(last_line, format!("missing key `{k}`")));
        let triple = |k: &str| -> Result<[f64; 3], ParseError> {
            let (line, v) = get(k)?;
            let parts: Vec<&str> = v.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(err(*line, format!("`{k}` needs three numbers")));
            }
            Ok([finite(*line, k, parts[0])?, finite(*line, k, parts[1])?, finite(*line, k, parts[2])?])
        };
        let r = triple("rvec")?;
        let (line, rmse) = get("rmse_px")?;
        let rmse_px = finite(*line, "rmse_px", rmse)?;
        let (line, it) = get("iterations")?;
        let iterations = it.parse().map_err(|_| err(*line, format!("iterations: `{it}` is not a count")))?;
        let (line, conv) = get("converged")?;
        let converged = conv.parse().map_err(|_| err(*line, format!("converged: `{conv}` is not true/false")))?;
        let stop_reason = match kv.get("stop_reason") {
            Some((line, v)) => Some(v.parse().map_err(|e: String| err(*line, e))?),
            None => None,
        };
        Ok(Self { rvec: RotationVector::new(r[0], r[1], r[2]), tvec: triple("tvec")?, rmse_px, iterations, converged, stop_reason })
    }
}

pub fn parse_solution(text: &str) -> Result<SolutionFile, ParseError> {
    text.parse()
}
