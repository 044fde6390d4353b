//! Camera model and coordinate transforms.
//!
//! Everything here is a pure function of its inputs. Points live in the
//! LiDAR (world) frame until an [`ExtrinsicTransform`] moves them into the
//! camera frame, where [`project_camera_point`] applies the pinhole model.
//!
//! Conventions: radians, meters, and pixels with the origin at the top-left
//! corner of the image (`u` grows rightward, `v` grows downward).

mod camera;
mod config;
mod rotation;

pub use camera::{
    project_camera_point, project_lidar_point, transform_point, DistortionParams, IntrinsicMatrix,
};
pub use config::{CameraConfig, ConfigError};
pub use rotation::{matrix_to_rodrigues, rodrigues_to_matrix, RotationMatrix, RotationVector};
pub(crate) use rotation::skew as rotation_skew;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

/// Tolerance used when validating user-supplied rotation matrices.
pub const ORTHONORMAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("point is behind the camera (camera-frame z = {z})")]
    BehindCamera { z: f64 },
    #[error("matrix is not a proper rotation (orthonormality error {error:.3e}, det {det})")]
    NotOrthonormal { error: f64, det: f64 },
    #[error("invalid intrinsics: {0}")]
    InvalidIntrinsics(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("lens distortion is not supported (coefficients must be zero): {0:?}")]
    NotSupported(DistortionParams),
}

/// A 3D point in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3D {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3D {
    pub const ORIGIN: Point3D = Point3D { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Euclidean distance from the frame origin.
    pub fn norm(&self) -> f64 {
        self.to_vector().norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v.x, v.y, v.z)
    }
}

/// Real-valued pixel coordinate. Never rounded here; rounding belongs to
/// overlay rendering.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PixelCoord {
    pub u: f64,
    pub v: f64,
}

impl PixelCoord {
    pub const fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }
}

/// Rigid transform taking LiDAR-frame points into the camera frame:
/// `p_cam = R * p_lidar + t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtrinsicTransform {
    pub rotation: RotationMatrix,
    pub translation: [f64; 3],
}

impl ExtrinsicTransform {
    pub fn identity() -> Self {
        Self { rotation: RotationMatrix::identity(), translation: [0.0; 3] }
    }

    pub fn new(rotation: RotationMatrix, translation: [f64; 3]) -> Result<Self, GeometryError> {
        if !translation.iter().all(|t| t.is_finite()) {
            return Err(GeometryError::NonFinite("translation"));
        }
        Ok(Self { rotation, translation })
    }

    pub fn from_rvec_tvec(rvec: RotationVector, tvec: [f64; 3]) -> Result<Self, GeometryError> {
        if !rvec.is_finite() {
            return Err(GeometryError::NonFinite("rotation vector"));
        }
        Self::new(rodrigues_to_matrix(rvec), tvec)
    }

    pub fn rotation_vector(&self) -> RotationVector {
        // `rotation` always satisfies the matrix invariants, so this cannot fail.
        matrix_to_rodrigues(&self.rotation).expect("extrinsic rotation is orthonormal")
    }

    pub fn translation_vector(&self) -> Vector3<f64> {
        Vector3::from(self.translation)
    }

    /// 4x4 homogeneous matrix `[R | t; 0 0 0 1]`, row-major.
    pub fn to_homogeneous(&self) -> [[f64; 4]; 4] {
        let r = self.rotation.rows();
        let t = self.translation;
        [
            [r[0][0], r[0][1], r[0][2], t[0]],
            [r[1][0], r[1][1], r[1][2], t[1]],
            [r[2][0], r[2][1], r[2][2], t[2]],
            [0.0, 0.0, 0.0, 1.0],
        ]
    }
}

impl Default for ExtrinsicTransform {
    fn default() -> Self {
        Self::identity()
    }
}
