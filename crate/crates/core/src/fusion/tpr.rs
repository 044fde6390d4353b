use serde::{Deserialize, Serialize};

use super::{BoardRegion, FusionError, OverlayResult};

/// Fractional range tolerance counted as a correct mapping.
pub const DEFAULT_TOLERANCE: f64 = 0.05;

/// Correct and wrong range mappings on one board. `tpr = tp / (tp + wrong)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionReport {
    pub board: String,
    pub tp: usize,
    pub wrong: usize,
    pub tpr: f64,
    pub tolerance_fraction: f64,
}

/// Scores the overlay points that land on `board`.
///
/// A point inside (or on the edge of) the board polygon is a true positive
/// when its LiDAR range is within `tolerance_fraction` of the board's
/// ground-truth range (edge inclusive), and a wrong mapping otherwise.
pub fn evaluate_tpr(overlay: &OverlayResult, board: &BoardRegion, tolerance_fraction: f64) -> Result<FusionReport, FusionError> {
    if !(tolerance_fraction.is_finite() && tolerance_fraction > 0.0) {
        return Err(FusionError::InvalidTolerance(tolerance_fraction));
    }
    // The slack keeps decimal edges such as 10.05 m at 0.5 % inclusive.
    let allowed = tolerance_fraction * board.ground_truth_range_m * (1.0 + 1e-12);
    let (mut tp, mut wrong) = (0, 0);
    for p in overlay.projected.iter().filter(|p| board.contains(p.pixel)) {
        if (p.range_m - board.ground_truth_range_m).abs() <= allowed {
            tp += 1;
        } else {
            wrong += 1;
        }
    }
    if tp + wrong == 0 {
        return Err(FusionError::NoPointsOnBoard { board: board.name.clone() });
    }
    Ok(FusionReport {
        board: board.name.clone(),
        tp,
        wrong,
        tpr: tp as f64 / (tp + wrong) as f64,
        tolerance_fraction,
    })
}
