use serde::{Deserialize, Serialize};

use super::{ExtrinsicTransform, GeometryError, PixelCoord, Point3D};

/// Pinhole intrinsics: focal lengths and principal point, all in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntrinsicMatrix {
    pub fx: f64,
    pub fy: f64,
    pub ox: f64,
    pub oy: f64,
}

impl IntrinsicMatrix {
    pub fn new(fx: f64, fy: f64, ox: f64, oy: f64) -> Result<Self, GeometryError> {
        if !(fx.is_finite() && fy.is_finite() && ox.is_finite() && oy.is_finite()) {
            return Err(GeometryError::NonFinite("intrinsics"));
        }
        if fx <= 0.0 || fy <= 0.0 {
            return Err(GeometryError::InvalidIntrinsics(format!(
                "focal lengths must be positive (fx = {fx}, fy = {fy})"
            )));
        }
        Ok(Self { fx, fy, ox, oy })
    }

    /// The 3x3 matrix `[[fx, 0, ox], [0, fy, oy], [0, 0, 1]]`.
    pub fn matrix(&self) -> [[f64; 3]; 3] {
        [[self.fx, 0.0, self.ox], [0.0, self.fy, self.oy], [0.0, 0.0, 1.0]]
    }

    /// Maps a pixel to the normalized image plane (`z = 1`).
    pub fn normalize(&self, px: PixelCoord) -> (f64, f64) {
        ((px.u - self.ox) / self.fx, (px.v - self.oy) / self.fy)
    }
}

/// Brown–Conrady coefficients. Carried through configuration so files from
/// calibration tools load unchanged, but only the all-zero model is usable.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DistortionParams {
    pub k1: f64,
    pub k2: f64,
    pub p1: f64,
    pub p2: f64,
    pub k3: f64,
}

impl DistortionParams {
    pub fn is_zero(&self) -> bool {
        [self.k1, self.k2, self.p1, self.p2, self.k3].iter().all(|c| *c == 0.0)
    }

    /// Identity for zero coefficients, `NotSupported` otherwise.
    pub fn ensure_identity(&self) -> Result<(), GeometryError> {
        if self.is_zero() {
            Ok(())
        } else {
            Err(GeometryError::NotSupported(*self))
        }
    }
}

/// `R * p + t`.
pub fn transform_point(ext: &ExtrinsicTransform, pw: Point3D) -> Point3D {
    let r = ext.rotation.matrix();
    let t = ext.translation;
    Point3D::new(
        r[(0, 0)] * pw.x + r[(0, 1)] * pw.y + r[(0, 2)] * pw.z + t[0],
        r[(1, 0)] * pw.x + r[(1, 1)] * pw.y + r[(1, 2)] * pw.z + t[1],
        r[(2, 0)] * pw.x + r[(2, 1)] * pw.y + r[(2, 2)] * pw.z + t[2],
    )
}

/// Pinhole projection of a camera-frame point: `u = fx·x/z + ox`,
/// `v = fy·y/z + oy`. No image-bounds check.
pub fn project_camera_point(k: &IntrinsicMatrix, pc: Point3D) -> Result<PixelCoord, GeometryError> {
    if !(pc.z > 0.0) {
        return Err(GeometryError::BehindCamera { z: pc.z });
    }
    Ok(PixelCoord::new(k.fx * pc.x / pc.z + k.ox, k.fy * pc.y / pc.z + k.oy))
}

/// Full LiDAR-to-pixel mapping: extrinsic change of basis followed by the
/// intrinsic projection.
pub fn project_lidar_point(
    k: &IntrinsicMatrix,
    ext: &ExtrinsicTransform,
    pw: Point3D,
) -> Result<PixelCoord, GeometryError> {
    project_camera_point(k, transform_point(ext, pw))
}
