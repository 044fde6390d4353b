use serde::{Deserialize, Serialize};

use super::FusionError;
use crate::cloud::PointCloudFrame;
use crate::geometry::{project_camera_point, transform_point, ExtrinsicTransform, IntrinsicMatrix, PixelCoord};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlayPoint {
    /// Index of the source point in its frame.
    pub index: usize,
    pub pixel: PixelCoord,
    /// Euclidean range in the LiDAR frame, meters.
    pub range_m: f64,
}

/// The in-image subset of a projected scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlayResult {
    pub projected: Vec<OverlayPoint>,
    pub image_width: u32,
    pub image_height: u32,
}

impl OverlayResult {
    pub fn len(&self) -> usize {
        self.projected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projected.is_empty()
    }
}

pub(crate) fn in_bounds(px: PixelCoord, width: u32, height: u32) -> bool {
    px.u >= 0.0 && px.u < width as f64 && px.v >= 0.0 && px.v < height as f64
}

/// Keeps exactly the points in front of the camera whose pixel lands inside
/// the `width × height` image, in input order.
pub fn project_cloud(
    frame: &PointCloudFrame,
    k: &IntrinsicMatrix,
    ext: &ExtrinsicTransform,
    width: u32,
    height: u32,
) -> Result<OverlayResult, FusionError> {
    if width == 0 || height == 0 {
        return Err(FusionError::InvalidImageSize { width, height });
    }
    let projected = frame
        .points
        .iter()
        .enumerate()
        .filter_map(|(index, p)| {
            let pixel = project_camera_point(k, transform_point(ext, p.position)).ok()?;
            let range_m = p.position.norm();
            (in_bounds(pixel, width, height) && range_m > 0.0).then_some(OverlayPoint { index, pixel, range_m })
        })
        .collect();
    Ok(OverlayResult { projected, image_width: width, image_height: height })
}
