//! CSV exports: overlay `point_index,u,v,range_m` and report
//! `board,tp,wrong,tpr,tolerance`.

use std::fmt::Write as _;

use super::{FusionError, FusionReport, OverlayPoint, OverlayResult};
use crate::geometry::PixelCoord;

pub const OVERLAY_HEADER: &str = "point_index,u,v,range_m";
pub const REPORT_HEADER: &str = "board,tp,wrong,tpr,tolerance";

pub fn write_overlay_csv(overlay: &OverlayResult) -> String {
    let mut out = format!("{OVERLAY_HEADER}\n");
    for p in &overlay.projected {
        let _ = writeln!(out, "{},{},{},{}", p.index, p.pixel.u, p.pixel.v, p.range_m);
    }
    out
}

/// Parses an overlay CSV. The image size is not part of the format, so the
/// caller supplies it.
pub fn parse_overlay_csv(text: &str, image_width: u32, image_height: u32) -> Result<OverlayResult, FusionError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == OVERLAY_HEADER => {}
        _ => return Err(FusionError::Parse { line: 1, message: format!("expected header `{OVERLAY_HEADER}`") }),
    }
    let mut projected = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let bad = |m: String| FusionError::Parse { line, message: m };
        let cols: Vec<&str> = raw.trim().split(',').collect();
        if cols.len() != 4 {
            return Err(bad(format!("expected 4 columns, found {}", cols.len())));
        }
        let index = cols[0].parse().map_err(|_| bad(format!("`{}` is not a point index", cols[0])))?;
        let num = |s: &str| match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(bad(format!("`{s}` is not a finite number"))),
        };
        projected.push(OverlayPoint { index, pixel: PixelCoord::new(num(cols[1])?, num(cols[2])?), range_m: num(cols[3])? });
    }
    Ok(OverlayResult { projected, image_width, image_height })
}

pub fn write_report_csv(reports: &[FusionReport]) -> String {
    let mut out = format!("{REPORT_HEADER}\n");
    for r in reports {
        let _ = writeln!(out, "{},{},{},{},{}", r.board, r.tp, r.wrong, r.tpr, r.tolerance_fraction);
    }
    out
}
