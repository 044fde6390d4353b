//! Track CSV input and TTC report output.
//!
//! Two input layouts, selected by the header line:
//!
//! ```text
//! id,timestamp_ns,lat,lon,alt
//! id,timestamp_ns,east,north,up
//! ```
//!
//! Geographic rows are projected around the first row of the file unless an
//! explicit origin is given. Rows of different tracks may interleave; each
//! track's rows must have strictly increasing timestamps.

use std::fmt::Write as _;

use super::{geo_to_enu, EnuPoint, GeoPoint, KinematicsError, Track, TtcReport};

pub const GEO_HEADER: &str = "id,timestamp_ns,lat,lon,alt";
pub const ENU_HEADER: &str = "id,timestamp_ns,east,north,up";
pub const TTC_HEADER: &str = "timestamp_ns,range_m,closing_speed_mps,ttc_s";

fn perr(line: usize, message: impl Into<String>) -> KinematicsError {
    KinematicsError::Parse { line, message: message.into() }
}

pub fn parse_tracks(text: &str, origin: Option<GeoPoint>) -> Result<Vec<Track>, KinematicsError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or_else(|| perr(1, "empty track file"))?;
    let geo = match header.replace(' ', "").as_str() {
        GEO_HEADER => true,
        ENU_HEADER => false,
        other => return Err(perr(hline, format!("unrecognized header `{other}`"))),
    };
    let mut origin = origin;
    let mut tracks: Vec<(String, Vec<EnuPoint>)> = Vec::new();
    for (line, row) in lines {
        let f: Vec<&str> = row.split(',').map(str::trim).collect();
        if f.len() != 5 {
            return Err(perr(line, format!("expected 5 fields, found {}", f.len())));
        }
        let ts: u64 = f[1].parse().map_err(|_| perr(line, format!("timestamp_ns: `{}` is not an integer", f[1])))?;
        let mut nums = [0.0; 3];
        for (k, n) in nums.iter_mut().enumerate() {
            *n = f[k + 2]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| perr(line, format!("field {}: `{}` is not a finite number", k + 3, f[k + 2])))?;
        }
        let point = if geo {
            let g = GeoPoint::new(nums[0], nums[1], nums[2], ts).map_err(|e| perr(line, e.to_string()))?;
            let o = *origin.get_or_insert(g);
            geo_to_enu(&o, &g).map_err(|e| perr(line, e.to_string()))?
        } else {
            EnuPoint::new(nums[0], nums[1], nums[2], ts)
        };
        let samples = match tracks.iter_mut().find(|(id, _)| id == f[0]) {
            Some((_, s)) => s,
            None => {
                tracks.push((f[0].to_string(), Vec::new()));
                &mut tracks.last_mut().expect("just pushed").1
            }
        };
        if samples.last().is_some_and(|p| p.timestamp_ns >= ts) {
            return Err(perr(line, format!("track `{}`: timestamp {ts} does not increase", f[0])));
        }
        samples.push(point);
    }
    tracks.into_iter().map(|(id, s)| Track::new(id, s)).collect()
}

pub fn write_tracks_enu(tracks: &[Track]) -> String {
    let mut out = format!("{ENU_HEADER}\n");
    for t in tracks {
        for s in t.samples() {
            let _ = writeln!(out, "{},{},{},{},{}", t.id(), s.timestamp_ns, s.east_m, s.north_m, s.up_m);
        }
    }
    out
}

/// `ttc_s` is written as `none` when the tracks are not closing.
pub fn write_ttc_csv(reports: &[TtcReport]) -> String {
    let mut out = format!("{TTC_HEADER}\n");
    for r in reports {
        let ttc = r.ttc_s.map_or_else(|| "none".to_string(), |v| format!("{v:.6}"));
        let _ = writeln!(out, "{},{:.6},{:.6},{}", r.timestamp_ns, r.range_m, r.closing_speed_mps, ttc);
    }
    out
}
