use serde::{Deserialize, Serialize};

use super::{KinematicsError, Track};

/// Ranges below this are treated as coincident tracks.
pub const ZERO_RANGE_M: f64 = 1e-9;
/// Closing speeds at or below this are rounding noise from the velocity
/// estimate, not an approach: 1 mm/s.
pub const MIN_CLOSING_SPEED_MPS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TtcReport {
    pub timestamp_ns: u64,
    pub range_m: f64,
    /// Positive when the tracks approach each other.
    pub closing_speed_mps: f64,
    /// `range / closing_speed`; `None` unless closing faster than
    /// [`MIN_CLOSING_SPEED_MPS`].
    pub ttc_s: Option<f64>,
}

/// Time-to-collision between two tracks at `t` under constant velocity.
///
/// Works in the horizontal (east, north) plane.
pub fn ttc(a: &Track, b: &Track, t: u64) -> Result<TtcReport, KinematicsError> {
    let (pa, pb) = (a.position_at(t)?, b.position_at(t)?);
    let (va, vb) = (a.velocity_at(t)?, b.velocity_at(t)?);
    let rel = [pb[0] - pa[0], pb[1] - pa[1]];
    let rel_v = [vb[0] - va[0], vb[1] - va[1]];
    let range_m = rel[0].hypot(rel[1]);
    if range_m < ZERO_RANGE_M {
        return Err(KinematicsError::ZeroRange { t });
    }
    let closing_speed_mps = -(rel[0] * rel_v[0] + rel[1] * rel_v[1]) / range_m;
    let ttc_s = (closing_speed_mps > MIN_CLOSING_SPEED_MPS).then(|| range_m / closing_speed_mps);
    Ok(TtcReport { timestamp_ns: t, range_m, closing_speed_mps, ttc_s })
}

/// Evaluates [`ttc`] at every sample time of `a` that lies inside `b`'s span.
/// Coincident instants are reported with zero range and zero TTC.
pub fn ttc_series(a: &Track, b: &Track) -> Result<Vec<TtcReport>, KinematicsError> {
    let (start, end) = b.span();
    a.samples()
        .iter()
        .map(|s| s.timestamp_ns)
        .filter(|t| (start..=end).contains(t))
        .map(|t| match ttc(a, b, t) {
            Err(KinematicsError::ZeroRange { t }) => {
                Ok(TtcReport { timestamp_ns: t, range_m: 0.0, closing_speed_mps: 0.0, ttc_s: Some(0.0) })
            }
            other => other,
        })
        .collect()
}
