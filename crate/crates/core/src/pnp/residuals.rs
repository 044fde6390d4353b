use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use super::{Correspondence, PnpError};
use crate::geometry::{rodrigues_to_matrix, transform_point, ExtrinsicTransform, IntrinsicMatrix, RotationVector};

/// Reprojection residuals `(u_proj − u_obs, v_proj − v_obs)` per pair, in
/// input order.
#[derive(Debug, Clone, PartialEq)]
pub struct Residuals {
    pub values: Vec<f64>,
    pub rmse_px: f64,
}

impl Residuals {
    pub fn cost(&self) -> f64 {
        self.values.iter().map(|r| r * r).sum()
    }

    pub fn pair(&self, i: usize) -> (f64, f64) {
        (self.values[2 * i], self.values[2 * i + 1])
    }
}

pub fn reprojection_residuals(
    ext: &ExtrinsicTransform,
    corrs: &[Correspondence],
    k: &IntrinsicMatrix,
) -> Result<Residuals, PnpError> {
    let mut values = Vec::with_capacity(corrs.len() * 2);
    for (index, c) in corrs.iter().enumerate() {
        let pc = transform_point(ext, c.lidar_point);
        if !(pc.z > 0.0) {
            return Err(PnpError::BehindCamera { index, z: pc.z });
        }
        values.push(k.fx * pc.x / pc.z + k.ox - c.pixel.u);
        values.push(k.fy * pc.y / pc.z + k.oy - c.pixel.v);
    }
    let rmse_px = if values.is_empty() {
        0.0
    } else {
        (values.iter().map(|r| r * r).sum::<f64>() / values.len() as f64).sqrt()
    };
    Ok(Residuals { values, rmse_px })
}

/// Derivatives of `R(v)` with respect to each rotation-vector component.
///
/// Uses the closed form `∂R/∂vᵢ = (vᵢ[v]ₓ + [v × (I − R)eᵢ]ₓ) R / |v|²`,
/// which falls back to `[eᵢ]ₓ` at the identity.
pub(crate) fn rotation_derivatives(rvec: RotationVector) -> [Matrix3<f64>; 3] {
    use crate::geometry::rotation_skew as skew;
    let v = rvec.to_vector();
    let theta2 = v.norm_squared();
    let r = *rodrigues_to_matrix(rvec).matrix();
    let basis = [Vector3::x(), Vector3::y(), Vector3::z()];
    if theta2 < 1e-20 {
        return basis.map(|e| skew(&e));
    }
    let vx = skew(&v);
    let i_minus_r = Matrix3::identity() - r;
    basis.map(|e| {
        let i = if e.x == 1.0 { 0 } else if e.y == 1.0 { 1 } else { 2 };
        (vx * v[i] + skew(&v.cross(&(i_minus_r * e)))) * r / theta2
    })
}

/// Analytic `2n × 6` Jacobian of [`reprojection_residuals`] with respect to
/// `(rx, ry, rz, tx, ty, tz)`.
pub fn pose_jacobian(
    rvec: RotationVector,
    tvec: [f64; 3],
    corrs: &[Correspondence],
    k: &IntrinsicMatrix,
) -> Result<DMatrix<f64>, PnpError> {
    let d_r = rotation_derivatives(rvec);
    let r = *rodrigues_to_matrix(rvec).matrix();
    let t = Vector3::from(tvec);
    let mut jac = DMatrix::zeros(corrs.len() * 2, 6);
    for (index, c) in corrs.iter().enumerate() {
        let pw = c.lidar_point.to_vector();
        let pc = r * pw + t;
        if !(pc.z > 0.0) {
            return Err(PnpError::BehindCamera { index, z: pc.z });
        }
        let inv_z = 1.0 / pc.z;
        // d(u, v) / d(pc)
        let du = Vector3::new(k.fx * inv_z, 0.0, -k.fx * pc.x * inv_z * inv_z);
        let dv = Vector3::new(0.0, k.fy * inv_z, -k.fy * pc.y * inv_z * inv_z);
        for (j, dr) in d_r.iter().enumerate() {
            let dpc = dr * pw;
            jac[(2 * index, j)] = du.dot(&dpc);
            jac[(2 * index + 1, j)] = dv.dot(&dpc);
        }
        for j in 0..3 {
            jac[(2 * index, 3 + j)] = du[j];
            jac[(2 * index + 1, 3 + j)] = dv[j];
        }
    }
    Ok(jac)
}

pub(crate) fn residual_vector(
    rvec: RotationVector,
    tvec: [f64; 3],
    corrs: &[Correspondence],
    k: &IntrinsicMatrix,
) -> Result<DVector<f64>, PnpError> {
    let ext = ExtrinsicTransform { rotation: rodrigues_to_matrix(rvec), translation: tvec };
    Ok(DVector::from_vec(reprojection_residuals(&ext, corrs, k)?.values))
}
