use serde::{Deserialize, Serialize};

use super::KinematicsError;

/// Mean Earth radius used by the local projection.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;
/// Largest horizontal offset for which the equirectangular approximation is
/// accepted.
pub const MAX_APPROXIMATION_RANGE_M: f64 = 50_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    /// Decimal degrees, north positive.
    pub latitude: f64,
    /// Decimal degrees, east positive.
    pub longitude: f64,
    pub altitude_m: f64,
    pub timestamp_ns: u64,
}

impl GeoPoint {
    pub fn new(latitude: f64, longitude: f64, altitude_m: f64, timestamp_ns: u64) -> Result<Self, KinematicsError> {
        if !(-90.0..=90.0).contains(&latitude) || !(-180.0..=180.0).contains(&longitude) || !altitude_m.is_finite() {
            return Err(KinematicsError::InvalidCoordinate { latitude, longitude });
        }
        Ok(Self { latitude, longitude, altitude_m, timestamp_ns })
    }
}

/// Local East-North-Up position relative to a declared origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnuPoint {
    pub east_m: f64,
    pub north_m: f64,
    pub up_m: f64,
    pub timestamp_ns: u64,
}

impl EnuPoint {
    pub fn new(east_m: f64, north_m: f64, up_m: f64, timestamp_ns: u64) -> Self {
        Self { east_m, north_m, up_m, timestamp_ns }
    }

    pub fn horizontal(&self) -> [f64; 2] {
        [self.east_m, self.north_m]
    }

    pub fn is_finite(&self) -> bool {
        self.east_m.is_finite() && self.north_m.is_finite() && self.up_m.is_finite()
    }
}

/// Equirectangular projection of `p` around `origin`. The output keeps the
/// timestamp of `p`.
pub fn geo_to_enu(origin: &GeoPoint, p: &GeoPoint) -> Result<EnuPoint, KinematicsError> {
    let k = EARTH_RADIUS_M * std::f64::consts::PI / 180.0;
    let east = (p.longitude - origin.longitude) * origin.latitude.to_radians().cos() * k;
    let north = (p.latitude - origin.latitude) * k;
    let distance_m = east.hypot(north);
    if !(distance_m <= MAX_APPROXIMATION_RANGE_M) {
        return Err(KinematicsError::OutOfApproximationRange { distance_m });
    }
    Ok(EnuPoint::new(east, north, p.altitude_m - origin.altitude_m, p.timestamp_ns))
}

/// Great-circle distance on the sphere of radius [`EARTH_RADIUS_M`].
pub fn haversine_m(a: &GeoPoint, b: &GeoPoint) -> f64 {
    let (p1, p2) = (a.latitude.to_radians(), b.latitude.to_radians());
    let dp = p2 - p1;
    let dl = (b.longitude - a.longitude).to_radians();
    let h = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * h.sqrt().asin()
}
