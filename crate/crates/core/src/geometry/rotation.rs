//! Axis-angle (Rodrigues) rotations.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::{GeometryError, ORTHONORMAL_TOL};

/// Axis-angle rotation: the direction is the axis, the magnitude the angle in
/// radians.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RotationVector {
    pub rx: f64,
    pub ry: f64,
    pub rz: f64,
}

impl RotationVector {
    pub const ZERO: RotationVector = RotationVector { rx: 0.0, ry: 0.0, rz: 0.0 };

    pub const fn new(rx: f64, ry: f64, rz: f64) -> Self {
        Self { rx, ry, rz }
    }

    pub fn angle(&self) -> f64 {
        self.to_vector().norm()
    }

    pub fn is_finite(&self) -> bool {
        self.rx.is_finite() && self.ry.is_finite() && self.rz.is_finite()
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.rx, self.ry, self.rz)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v.x, v.y, v.z)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.rx, self.ry, self.rz]
    }
}

impl std::ops::Neg for RotationVector {
    type Output = RotationVector;

    fn neg(self) -> Self::Output {
        RotationVector::new(-self.rx, -self.ry, -self.rz)
    }
}

/// A proper rotation matrix. Construction through [`RotationMatrix::try_new`]
/// checks orthonormality and a positive determinant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 3]; 3]", into = "[[f64; 3]; 3]")]
pub struct RotationMatrix(Matrix3<f64>);

impl RotationMatrix {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Validates `m` as a rotation within [`ORTHONORMAL_TOL`].
    pub fn try_new(m: Matrix3<f64>) -> Result<Self, GeometryError> {
        let (error, det) = orthonormality(&m);
        if !(error <= ORTHONORMAL_TOL && (det - 1.0).abs() <= ORTHONORMAL_TOL) {
            return Err(GeometryError::NotOrthonormal { error, det });
        }
        Ok(Self(m))
    }

    pub fn from_rows(rows: [[f64; 3]; 3]) -> Result<Self, GeometryError> {
        Self::try_new(Matrix3::from_fn(|i, j| rows[i][j]))
    }

    /// Nearest rotation to an arbitrary 3x3 matrix in the Frobenius sense.
    pub fn nearest(m: &Matrix3<f64>) -> Result<Self, GeometryError> {
        if m.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::NonFinite("rotation block"));
        }
        let svd = m.svd(true, true);
        let u = svd.u.expect("u requested");
        let v_t = svd.v_t.expect("v_t requested");
        let mut r = u * v_t;
        if r.determinant() < 0.0 {
            // flip the direction paired with the smallest singular value
            let weakest = sorted_desc(&svd.singular_values)[2];
            let mut u_fixed = u;
            u_fixed.column_mut(weakest).neg_mut();
            r = u_fixed * v_t;
        }
        Self::try_new(r)
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn rows(&self) -> [[f64; 3]; 3] {
        let m = &self.0;
        [
            [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
            [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
            [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
        ]
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    /// `self * other`, re-projected onto the rotation group so repeated
    /// composition never drifts.
    pub fn compose(&self, other: &RotationMatrix) -> Self {
        let m = self.0 * other.0;
        Self::nearest(&m).unwrap_or(Self(m))
    }

    pub fn apply(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0 * v
    }

    /// Max-abs entry of `RᵀR − I` and the determinant.
    pub fn orthonormality(&self) -> (f64, f64) {
        orthonormality(&self.0)
    }
}

impl From<RotationMatrix> for [[f64; 3]; 3] {
    fn from(r: RotationMatrix) -> Self {
        r.rows()
    }
}

impl TryFrom<[[f64; 3]; 3]> for RotationMatrix {
    type Error = GeometryError;

    fn try_from(rows: [[f64; 3]; 3]) -> Result<Self, Self::Error> {
        Self::from_rows(rows)
    }
}

fn orthonormality(m: &Matrix3<f64>) -> (f64, f64) {
    let e = m.transpose() * m - Matrix3::identity();
    let error = e.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    (if error.is_nan() { f64::INFINITY } else { error }, m.determinant())
}

fn sorted_desc(s: &Vector3<f64>) -> [usize; 3] {
    let mut idx = [0, 1, 2];
    idx.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    idx
}

pub(crate) fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Expands an axis-angle vector into a rotation matrix.
///
/// Near zero the closed form is replaced by its Taylor series so the result
/// stays accurate to machine precision.
pub fn rodrigues_to_matrix(rvec: RotationVector) -> RotationMatrix {
    let w = rvec.to_vector();
    let theta2 = w.norm_squared();
    let k = skew(&w);
    let k2 = k * k;
    let (a, b) = if theta2 < 1e-12 {
        // sin(θ)/θ and (1 − cos θ)/θ² to fourth order
        (1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0, 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0)
    } else {
        let theta = theta2.sqrt();
        (theta.sin() / theta, (1.0 - theta.cos()) / theta2)
    };
    RotationMatrix(Matrix3::identity() + k * a + k2 * b)
}

/// Recovers the axis-angle vector with angle in `[0, π]`.
///
/// At exactly π the two antipodal representatives describe the same
/// rotation; the one whose first nonzero component is positive is returned.
pub fn matrix_to_rodrigues(r: &RotationMatrix) -> Result<RotationVector, GeometryError> {
    let m = r.matrix();
    let (error, det) = orthonormality(m);
    if !(error <= ORTHONORMAL_TOL && (det - 1.0).abs() <= ORTHONORMAL_TOL) {
        return Err(GeometryError::NotOrthonormal { error, det });
    }

    // Shepperd's method: extract a unit quaternion from the largest diagonal
    // term, then convert to axis-angle through atan2 for full-range accuracy.
    let trace = m.trace();
    let (w, x, y, z);
    if trace >= m[(0, 0)] && trace >= m[(1, 1)] && trace >= m[(2, 2)] {
        let s = (1.0 + trace).sqrt() * 2.0;
        w = 0.25 * s;
        x = (m[(2, 1)] - m[(1, 2)]) / s;
        y = (m[(0, 2)] - m[(2, 0)]) / s;
        z = (m[(1, 0)] - m[(0, 1)]) / s;
    } else if m[(0, 0)] >= m[(1, 1)] && m[(0, 0)] >= m[(2, 2)] {
        let s = (1.0 + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).sqrt() * 2.0;
        w = (m[(2, 1)] - m[(1, 2)]) / s;
        x = 0.25 * s;
        y = (m[(0, 1)] + m[(1, 0)]) / s;
        z = (m[(0, 2)] + m[(2, 0)]) / s;
    } else if m[(1, 1)] >= m[(2, 2)] {
        let s = (1.0 + m[(1, 1)] - m[(0, 0)] - m[(2, 2)]).sqrt() * 2.0;
        w = (m[(0, 2)] - m[(2, 0)]) / s;
        x = (m[(0, 1)] + m[(1, 0)]) / s;
        y = 0.25 * s;
        z = (m[(1, 2)] + m[(2, 1)]) / s;
    } else {
        let s = (1.0 + m[(2, 2)] - m[(0, 0)] - m[(1, 1)]).sqrt() * 2.0;
        w = (m[(1, 0)] - m[(0, 1)]) / s;
        x = (m[(0, 2)] + m[(2, 0)]) / s;
        y = (m[(1, 2)] + m[(2, 1)]) / s;
        z = 0.25 * s;
    }

    let mut axis = Vector3::new(x, y, z);
    let mut w = w;
    if w < 0.0 {
        axis = -axis;
        w = -w;
    }
    let sin_half = axis.norm();
    if sin_half == 0.0 {
        return Ok(RotationVector::ZERO);
    }
    let angle = 2.0 * sin_half.atan2(w);
    let mut v = axis * (angle / sin_half);

    if w <= 1e-15 {
        // half-turn: fix the sign of the representative
        let first = v.iter().copied().find(|c| c.abs() > 1e-12).unwrap_or(0.0);
        if first < 0.0 {
            v = -v;
        }
        v *= PI / v.norm();
    }
    Ok(RotationVector::from_vector(&v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_rvec(rng: &mut ChaCha8Rng, max_angle: f64) -> RotationVector {
        loop {
            let v = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let n = v.norm();
            if n > 1e-3 && n <= 1.0 {
                let angle = rng.random_range(1e-6..max_angle);
                return RotationVector::from_vector(&(v / n * angle));
            }
        }
    }

    #[test]
    fn zero_vector_is_identity() {
        assert_eq!(rodrigues_to_matrix(RotationVector::ZERO).matrix(), &Matrix3::identity());
    }

    #[test]
    fn half_turn_about_z() {
        let r = rodrigues_to_matrix(RotationVector::new(0.0, 0.0, PI));
        let expected = Matrix3::new(-1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 1.0);
        assert!((r.matrix() - expected).abs().max() < 1e-15);
    }

    #[test]
    fn axis_is_a_fixed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let rvec = random_rvec(&mut rng, PI);
            let axis = rvec.to_vector().normalize();
            let image = rodrigues_to_matrix(rvec).apply(&axis);
            assert!((image - axis).abs().max() < 1e-12);
        }
    }

    #[test]
    fn identity_to_zero_vector() {
        assert_eq!(matrix_to_rodrigues(&RotationMatrix::identity()).unwrap(), RotationVector::ZERO);
    }

    #[test]
    fn half_turn_sign_convention() {
        for rows in [
            [[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]],
            [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]],
        ] {
            let r = RotationMatrix::from_rows(rows).unwrap();
            let v = matrix_to_rodrigues(&r).unwrap();
            assert!((v.angle() - PI).abs() < 1e-12);
            let first = v.to_array().into_iter().find(|c| c.abs() > 1e-12).unwrap();
            assert!(first > 0.0);
            let back = rodrigues_to_matrix(v);
            assert!((back.matrix() - r.matrix()).abs().max() < 1e-12);
        }
        // negative-z half turn also maps to +z
        let v = matrix_to_rodrigues(&rodrigues_to_matrix(RotationVector::new(0.0, 0.0, -PI))).unwrap();
        assert!((v.rz - PI).abs() < 1e-12 && v.rx == 0.0 && v.ry == 0.0);
    }

    #[test]
    fn rejects_non_orthonormal() {
        let m = Matrix3::new(1.0, 0.01, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(matches!(RotationMatrix::try_new(m), Err(GeometryError::NotOrthonormal { .. })));
        let reflection = Matrix3::new(-1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(RotationMatrix::try_new(reflection).is_err());
        // bypass construction checks to exercise the inverse's own guard
        let bad = RotationMatrix(m);
        assert!(matrix_to_rodrigues(&bad).is_err());
    }

    #[test]
    fn round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let rvec = random_rvec(&mut rng, PI - 1e-3);
            let back = matrix_to_rodrigues(&rodrigues_to_matrix(rvec)).unwrap();
            assert!((back.to_vector() - rvec.to_vector()).abs().max() < 1e-9, "{rvec:?} -> {back:?}");
        }
    }

    #[test]
    fn tiny_angles_round_trip() {
        for angle in [1e-14, 1e-10, 1e-7, 1e-5] {
            let rvec = RotationVector::new(angle * 0.6, -angle * 0.8, 0.0);
            let back = matrix_to_rodrigues(&rodrigues_to_matrix(rvec)).unwrap();
            assert!((back.to_vector() - rvec.to_vector()).abs().max() < 1e-15);
        }
    }

    #[test]
    fn nearest_projects_noisy_matrix() {
        let r = rodrigues_to_matrix(RotationVector::new(0.3, -0.2, 1.1));
        let noisy = r.matrix() * 1.7 + Matrix3::from_element(1e-9);
        let fixed = RotationMatrix::nearest(&noisy).unwrap();
        assert!((fixed.matrix() - r.matrix()).abs().max() < 1e-8);
        let (err, det) = fixed.orthonormality();
        assert!(err < 1e-12 && (det - 1.0).abs() < 1e-12);
        // reflections get flipped to the closest proper rotation
        let refl = -Matrix3::<f64>::identity();
        let p = RotationMatrix::nearest(&refl).unwrap();
        assert!((p.orthonormality().1 - 1.0).abs() < 1e-12);
    }
}
