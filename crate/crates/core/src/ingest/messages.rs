//! Payload encodings for the standard recording topics.
//!
//! Point clouds are stored as `count u32 | count × {x f32 | y f32 | z f32 |
//! intensity u8}` (little-endian), the same point layout as the LiDAR wire
//! format. The record timestamp is the scan timestamp. NMEA records hold the
//! raw sentence text; image records hold PNG bytes.

use crate::cloud::{CloudPoint, PointCloudFrame};
use crate::geometry::Point3D;

use super::packet::POINT_LEN;

pub const TYPE_POINT_CLOUD: &str = "sensor/PointCloud";
pub const TYPE_NMEA: &str = "gps/NmeaSentence";
pub const TYPE_IMAGE_PNG: &str = "camera/ImagePng";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MessageError {
    #[error("point-cloud payload of {len} bytes does not match its point count {count}")]
    BadCloudLength { len: usize, count: usize },
    #[error("NMEA payload is not UTF-8")]
    NotUtf8,
}

/// Encodes point positions as f32, which is the precision of the sensor.
pub fn encode_point_cloud(frame: &PointCloudFrame) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 + frame.points.len() * POINT_LEN);
    out.extend_from_slice(&(frame.points.len() as u32).to_le_bytes());
    for p in &frame.points {
        for c in [p.position.x, p.position.y, p.position.z] {
            out.extend_from_slice(&(c as f32).to_le_bytes());
        }
        out.push(p.intensity);
    }
    out
}

pub fn decode_point_cloud(timestamp_ns: u64, payload: &[u8]) -> Result<PointCloudFrame, MessageError> {
    let bad = |count| MessageError::BadCloudLength { len: payload.len(), count };
    let head: [u8; 4] = payload.get(..4).and_then(|s| s.try_into().ok()).ok_or(bad(0))?;
    let count = u32::from_le_bytes(head) as usize;
    let body = &payload[4..];
    if body.len() != count * POINT_LEN {
        return Err(bad(count));
    }
    let f = |b: &[u8]| f32::from_le_bytes(b.try_into().expect("4 bytes")) as f64;
    let points = body
        .chunks_exact(POINT_LEN)
        .map(|c| CloudPoint::new(Point3D::new(f(&c[0..4]), f(&c[4..8]), f(&c[8..12])), c[12]))
        .collect();
    Ok(PointCloudFrame::new(timestamp_ns, points))
}

pub fn decode_nmea(payload: &[u8]) -> Result<&str, MessageError> {
    std::str::from_utf8(payload).map_err(|_| MessageError::NotUtf8)
}
