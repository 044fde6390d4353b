//! LiDAR→camera extrinsic calibration from point/pixel correspondences.
//!
//! The pipeline is the classic two-stage PnP:
//!
//! 1. [`solve_pnp_linear`] builds the homogeneous DLT system in normalized
//!    image coordinates and extracts a pose from its null vector.
//! 2. [`refine_pnp_lm`] minimizes the pixel reprojection error with
//!    Levenberg–Marquardt over the 6-vector `(rvec, tvec)`.
//!
//! [`apply_fine_tune`] applies the small manual corrections an operator
//! makes while watching the overlay.

mod dlt;
mod fine_tune;
mod io;
mod lm;
mod residuals;

pub use dlt::{solve_pnp_linear, DEGENERACY_RATIO};
pub use fine_tune::{apply_fine_tune, FineTuneDelta};
pub use io::{parse_correspondences, parse_solution, write_correspondences, ParseError, SolutionFile};
pub use lm::{refine_pnp_lm, refine_pnp_lm_with_cancel, LmConfig, PnpSolution, StopReason, MAX_LAMBDA};
pub use residuals::{pose_jacobian, reprojection_residuals, Residuals};

use serde::{Deserialize, Serialize};

use crate::geometry::{IntrinsicMatrix, PixelCoord, Point3D};

/// Fewest correspondences accepted by the solvers.
pub const MIN_PAIRS: usize = 6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PnpError {
    #[error("need at least {MIN_PAIRS} correspondences, got {0}")]
    TooFewPairs(usize),
    #[error("degenerate point configuration (singular value ratio {ratio:.3e} > {DEGENERACY_RATIO})")]
    DegenerateConfiguration { ratio: f64 },
    #[error("correspondence {index} is behind the camera (z = {z})")]
    BehindCamera { index: usize, z: f64 },
    #[error("normal equations unsolvable even at damping {lambda:.1e}")]
    NumericalBreakdown { lambda: f64 },
    #[error("correspondence {0} has non-finite coordinates")]
    NonFinite(usize),
    #[error("invalid LM configuration: {0}")]
    InvalidConfig(String),
    #[error("cancelled after {iterations} iterations")]
    Cancelled { iterations: usize },
}

/// One LiDAR point and the pixel where it appears in the image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correspondence {
    pub lidar_point: Point3D,
    pub pixel: PixelCoord,
    #[serde(default)]
    pub label: String,
}

impl Correspondence {
    pub fn new(label: impl Into<String>, pixel: PixelCoord, lidar_point: Point3D) -> Self {
        Self { lidar_point, pixel, label: label.into() }
    }
}

pub(crate) fn validate_pairs(corrs: &[Correspondence]) -> Result<(), PnpError> {
    if corrs.len() < MIN_PAIRS {
        return Err(PnpError::TooFewPairs(corrs.len()));
    }
    if let Some(i) = corrs.iter().position(|c| !c.lidar_point.is_finite() || !c.pixel.is_finite()) {
        return Err(PnpError::NonFinite(i));
    }
    Ok(())
}

/// Linear initialization followed by LM refinement.
pub fn calibrate(
    corrs: &[Correspondence],
    k: &IntrinsicMatrix,
    cfg: &LmConfig,
) -> Result<PnpSolution, PnpError> {
    let init = solve_pnp_linear(corrs, k)?;
    refine_pnp_lm(&init, corrs, k, cfg)
}
