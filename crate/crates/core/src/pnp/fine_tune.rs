use serde::{Deserialize, Serialize};

use crate::geometry::{rodrigues_to_matrix, ExtrinsicTransform, RotationVector};

/// Manual correction to an extrinsic: a small rotation applied in the camera
/// frame and an additive translation.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FineTuneDelta {
    pub d_rvec: RotationVector,
    pub d_tvec: [f64; 3],
}

impl FineTuneDelta {
    pub fn new(d_rvec: RotationVector, d_tvec: [f64; 3]) -> Self {
        Self { d_rvec, d_tvec }
    }

    /// The delta that undoes `self` when applied to the updated transform.
    pub fn inverse(&self) -> Self {
        Self { d_rvec: -self.d_rvec, d_tvec: self.d_tvec.map(|t| -t) }
    }

    pub fn is_valid(&self) -> bool {
        self.d_rvec.is_finite() && self.d_rvec.angle() < std::f64::consts::PI && self.d_tvec.iter().all(|t| t.is_finite())
    }
}

/// `R' = exp(d_rvec) · R`, `t' = t + d_tvec`.
pub fn apply_fine_tune(ext: &ExtrinsicTransform, delta: &FineTuneDelta) -> ExtrinsicTransform {
    let rotation = if delta.d_rvec == RotationVector::ZERO {
        ext.rotation
    } else {
        rodrigues_to_matrix(delta.d_rvec).compose(&ext.rotation)
    };
    let t = ext.translation;
    let d = delta.d_tvec;
    ExtrinsicTransform { rotation, translation: [t[0] + d[0], t[1] + d[1], t[2] + d[2]] }
}
