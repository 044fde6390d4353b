//! Trajectories in a local metric frame: GPS projection, velocities and
//! time-to-collision.

mod csv;
mod geo;
mod track;
mod ttc;

pub use csv::{parse_tracks, write_tracks_enu, write_ttc_csv, ENU_HEADER, GEO_HEADER, TTC_HEADER};
pub use geo::{geo_to_enu, haversine_m, EnuPoint, GeoPoint, EARTH_RADIUS_M, MAX_APPROXIMATION_RANGE_M};
pub use track::Track;
pub use ttc::{ttc, ttc_series, TtcReport, MIN_CLOSING_SPEED_MPS, ZERO_RANGE_M};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KinematicsError {
    #[error("point is {distance_m:.0} m from the origin, beyond the local-projection limit")]
    OutOfApproximationRange { distance_m: f64 },
    #[error("coordinate out of range: lat {latitude}, lon {longitude}")]
    InvalidCoordinate { latitude: f64, longitude: f64 },
    #[error("track `{0}` has no samples")]
    EmptyTrack(String),
    #[error("track `{0}` has a single sample; velocity needs two")]
    SingleSample(String),
    #[error("track `{track}`: sample {index} is not finite")]
    NonFinite { track: String, index: usize },
    #[error("track `{track}`: timestamp of sample {index} does not increase")]
    NotIncreasing { track: String, index: usize },
    #[error("track `{track}`: t = {t} outside span [{start}, {end}]")]
    OutOfSpan { track: String, t: u64, start: u64, end: u64 },
    #[error("tracks coincide at t = {t}")]
    ZeroRange { t: u64 },
    #[error("smoothing window must be odd and positive, got {0}")]
    InvalidWindow(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
