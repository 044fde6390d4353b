//! Point-cloud scans as produced by the frame assembler and consumed by the
//! fusion stage.

use serde::{Deserialize, Serialize};

use crate::geometry::Point3D;

/// Full-resolution scan size: 64 beams × 2048 columns.
pub const MAX_POINTS_PER_FRAME: usize = 64 * 2048;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloudPoint {
    pub position: Point3D,
    /// Return intensity, 0–255.
    pub intensity: u8,
}

impl CloudPoint {
    pub fn new(position: Point3D, intensity: u8) -> Self {
        Self { position, intensity }
    }
}

/// One LiDAR scan in the LiDAR frame.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PointCloudFrame {
    /// Nanoseconds since the Unix epoch.
    pub timestamp_ns: u64,
    pub points: Vec<CloudPoint>,
}

impl PointCloudFrame {
    pub fn new(timestamp_ns: u64, points: Vec<CloudPoint>) -> Self {
        Self { timestamp_ns, points }
    }

    pub fn from_positions(timestamp_ns: u64, positions: impl IntoIterator<Item = Point3D>) -> Self {
        Self { timestamp_ns, points: positions.into_iter().map(|p| CloudPoint::new(p, 0)).collect() }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Deterministic stride subsample holding at most `max_points` points.
    /// Returns `(stride, indices)`; indices refer to the full frame.
    pub fn decimate(&self, max_points: usize) -> (usize, Vec<usize>) {
        if max_points == 0 {
            return (0, Vec::new());
        }
        let stride = self.points.len().div_ceil(max_points).max(1);
        (stride, (0..self.points.len()).step_by(stride).collect())
    }
}
