//! Direct linear transform initialization.

use nalgebra::{DMatrix, Matrix3, Vector3};

use super::{validate_pairs, Correspondence, PnpError};
use crate::geometry::{transform_point, ExtrinsicTransform, IntrinsicMatrix, RotationMatrix};

/// The system is rejected as degenerate when the smallest singular value is
/// more than this fraction of the second smallest.
pub const DEGENERACY_RATIO: f64 = 0.1;

/// Linear pose estimate from at least six correspondences.
///
/// Pixels are first mapped to the normalized image plane and the 3D points
/// are centered and scaled, so the `2n × 12` system solves for `s·[R | t]`
/// directly. Scale comes from the rotation block's row norms, the sign from
/// requiring positive depth at the centroid, and the rotation block is then
/// projected onto the nearest proper rotation.
pub fn solve_pnp_linear(corrs: &[Correspondence], k: &IntrinsicMatrix) -> Result<ExtrinsicTransform, PnpError> {
    validate_pairs(corrs)?;
    let n = corrs.len();

    let centroid = corrs.iter().map(|c| c.lidar_point.to_vector()).sum::<Vector3<f64>>() / n as f64;
    let spread = corrs.iter().map(|c| (c.lidar_point.to_vector() - centroid).norm()).sum::<f64>() / n as f64;
    let scale = if spread > 0.0 { 3f64.sqrt() / spread } else { 1.0 };

    let mut a = DMatrix::<f64>::zeros(2 * n, 12);
    for (i, c) in corrs.iter().enumerate() {
        let q = (c.lidar_point.to_vector() - centroid) * scale;
        let (x, y) = k.normalize(c.pixel);
        let hom = [q.x, q.y, q.z, 1.0];
        for j in 0..4 {
            a[(2 * i, j)] = hom[j];
            a[(2 * i, 8 + j)] = -x * hom[j];
            a[(2 * i + 1, 4 + j)] = hom[j];
            a[(2 * i + 1, 8 + j)] = -y * hom[j];
        }
    }

    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let sigma = |i: usize| svd.singular_values[order[i]];
    let (smallest, second, largest) = (sigma(0), sigma(1), sigma(order.len() - 1));
    let ratio = if second > 0.0 { smallest / second } else { f64::INFINITY };
    // A multi-dimensional null space (e.g. coplanar points) shows up as two
    // vanishing singular values whose ratio is meaningless.
    if !(ratio <= DEGENERACY_RATIO) || second <= 1e-10 * largest {
        return Err(PnpError::DegenerateConfiguration { ratio });
    }
    let p = v_t.row(order[0]).transpose();

    // Undo the point normalization: M [X; 1] = M' [(X - c) s; 1].
    let m_prime = Matrix3::new(p[0], p[1], p[2], p[4], p[5], p[6], p[8], p[9], p[10]);
    let t_prime = Vector3::new(p[3], p[7], p[11]);
    let mut m = m_prime * scale;
    let mut t = t_prime - m * centroid;

    let row_scale = (m.row(0).norm() + m.row(1).norm() + m.row(2).norm()) / 3.0;
    if !(row_scale > 0.0) || !row_scale.is_finite() {
        return Err(PnpError::DegenerateConfiguration { ratio });
    }
    m /= row_scale;
    t /= row_scale;
    if (m * centroid + t).z < 0.0 {
        m = -m;
        t = -t;
    }

    let rotation = RotationMatrix::nearest(&m).map_err(|_| PnpError::DegenerateConfiguration { ratio })?;
    let ext = ExtrinsicTransform { rotation, translation: [t.x, t.y, t.z] };
    for (index, c) in corrs.iter().enumerate() {
        let z = transform_point(&ext, c.lidar_point).z;
        if !(z > 0.0) {
            return Err(PnpError::BehindCamera { index, z });
        }
    }
    Ok(ext)
}
