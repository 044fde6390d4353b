//! Levenberg–Marquardt refinement of the reprojection error.

use nalgebra::{DVector, Matrix6, Vector6};
use serde::{Deserialize, Serialize};

use super::residuals::{pose_jacobian, residual_vector};
use super::{validate_pairs, Correspondence, PnpError};
use crate::geometry::{
    matrix_to_rodrigues, rodrigues_to_matrix, ExtrinsicTransform, IntrinsicMatrix, RotationVector,
};

/// Damping beyond which the solver gives up on a step.
pub const MAX_LAMBDA: f64 = 1e12;

/// Damping schedule and stopping thresholds. Damping is plain `λI`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LmConfig {
    pub lambda_init: f64,
    /// Multiplier applied to λ after a rejected step.
    pub lambda_up: f64,
    /// Divisor applied to λ after an accepted step.
    pub lambda_down: f64,
    pub max_iters: usize,
    /// Stop when an accepted step lowers the cost by less than this fraction.
    pub cost_tol: f64,
    /// Stop when the step is smaller than this, relative to the parameters.
    pub step_tol: f64,
}

impl Default for LmConfig {
    fn default() -> Self {
        Self { lambda_init: 1e-3, lambda_up: 10.0, lambda_down: 10.0, max_iters: 100, cost_tol: 1e-12, step_tol: 1e-12 }
    }
}

impl LmConfig {
    pub fn validate(&self) -> Result<(), PnpError> {
        let positive = [self.lambda_init, self.lambda_up, self.lambda_down, self.cost_tol, self.step_tol];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) || self.max_iters == 0 {
            return Err(PnpError::InvalidConfig("all LM settings must be positive and finite".into()));
        }
        if self.lambda_up <= 1.0 || self.lambda_down <= 1.0 {
            return Err(PnpError::InvalidConfig("lambda_up and lambda_down must exceed 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// Residuals are exactly zero.
    ZeroCost,
    /// Relative cost decrease fell below `cost_tol`.
    CostTolerance,
    /// Proposed step fell below `step_tol`.
    StepTolerance,
    /// Damping saturated at [`MAX_LAMBDA`] without finding a lower cost.
    NoFurtherDecrease,
    MaxIterations,
}

impl StopReason {
    pub fn converged(self) -> bool {
        !matches!(self, StopReason::MaxIterations)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::ZeroCost => "zero_cost",
            StopReason::CostTolerance => "cost_tolerance",
            StopReason::StepTolerance => "step_tolerance",
            StopReason::NoFurtherDecrease => "no_further_decrease",
            StopReason::MaxIterations => "max_iterations",
        }
    }
}

impl std::str::FromStr for StopReason {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            StopReason::ZeroCost,
            StopReason::CostTolerance,
            StopReason::StepTolerance,
            StopReason::NoFurtherDecrease,
            StopReason::MaxIterations,
        ]
        .into_iter()
        .find(|r| r.as_str() == s)
        .ok_or_else(|| format!("unknown stop reason `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PnpSolution {
    pub rvec: RotationVector,
    pub tvec: [f64; 3],
    pub rmse_px: f64,
    /// Loop iterations, accepted or rejected.
    pub iterations: usize,
    pub accepted_steps: usize,
    pub converged: bool,
    pub stop_reason: StopReason,
    /// Sum of squared residuals: the initial cost followed by the cost after
    /// every accepted step.
    pub cost_history: Vec<f64>,
    /// λ in effect at every iteration.
    pub lambda_history: Vec<f64>,
}

impl PnpSolution {
    pub fn extrinsic(&self) -> ExtrinsicTransform {
        ExtrinsicTransform { rotation: rodrigues_to_matrix(self.rvec), translation: self.tvec }
    }
}

/// Refines `init` by minimizing the summed squared pixel residuals.
pub fn refine_pnp_lm(
    init: &ExtrinsicTransform,
    corrs: &[Correspondence],
    k: &IntrinsicMatrix,
    cfg: &LmConfig,
) -> Result<PnpSolution, PnpError> {
    refine_pnp_lm_with_cancel(init, corrs, k, cfg, || false)
}

/// As [`refine_pnp_lm`], polling `cancelled` once per iteration.
pub fn refine_pnp_lm_with_cancel(
    init: &ExtrinsicTransform,
    corrs: &[Correspondence],
    k: &IntrinsicMatrix,
    cfg: &LmConfig,
    mut cancelled: impl FnMut() -> bool,
) -> Result<PnpSolution, PnpError> {
    validate_pairs(corrs)?;
    cfg.validate()?;

    let mut rvec = init.rotation_vector();
    let mut tvec = init.translation;
    let mut residuals = residual_vector(rvec, tvec, corrs, k)?;
    let mut cost = residuals.norm_squared();
    let mut lambda = cfg.lambda_init;
    let mut cost_history = vec![cost];
    let mut lambda_history = Vec::new();
    let mut accepted_steps = 0;
    let mut iterations = 0;
    let mut stop = if cost == 0.0 { Some(StopReason::ZeroCost) } else { None };

    // Normal equations are rebuilt only after an accepted step.
    let mut normal = normal_equations(rvec, tvec, corrs, k, &residuals)?;

    while stop.is_none() {
        if iterations >= cfg.max_iters {
            stop = Some(StopReason::MaxIterations);
            break;
        }
        if cancelled() {
            return Err(PnpError::Cancelled { iterations });
        }
        iterations += 1;
        lambda_history.push(lambda);

        let (jtj, jtr) = &normal;
        let damped = jtj + Matrix6::identity() * lambda;
        let Some(step) = damped.cholesky().map(|c| c.solve(&(-jtr))) else {
            lambda *= cfg.lambda_up;
            if lambda > MAX_LAMBDA {
                return Err(PnpError::NumericalBreakdown { lambda });
            }
            continue;
        };
        if !step.iter().all(|s| s.is_finite()) {
            lambda *= cfg.lambda_up;
            if lambda > MAX_LAMBDA {
                return Err(PnpError::NumericalBreakdown { lambda });
            }
            continue;
        }

        let params = Vector6::new(rvec.rx, rvec.ry, rvec.rz, tvec[0], tvec[1], tvec[2]);
        if step.norm() <= cfg.step_tol * (params.norm() + cfg.step_tol) {
            stop = Some(StopReason::StepTolerance);
            break;
        }

        let candidate = params + step;
        // keep the rotation vector canonical (angle in [0, π])
        let cand_rvec = matrix_to_rodrigues(&rodrigues_to_matrix(RotationVector::new(
            candidate[0],
            candidate[1],
            candidate[2],
        )))
        .expect("rodrigues output is orthonormal");
        let cand_tvec = [candidate[3], candidate[4], candidate[5]];

        let cand_residuals = match residual_vector(cand_rvec, cand_tvec, corrs, k) {
            Ok(r) => Some(r),
            Err(PnpError::BehindCamera { .. }) => None,
            Err(e) => return Err(e),
        };
        match cand_residuals {
            Some(r) if r.norm_squared() < cost => {
                let new_cost = r.norm_squared();
                let decrease = (cost - new_cost) / cost;
                rvec = cand_rvec;
                tvec = cand_tvec;
                residuals = r;
                cost = new_cost;
                accepted_steps += 1;
                cost_history.push(cost);
                lambda /= cfg.lambda_down;
                if cost == 0.0 {
                    stop = Some(StopReason::ZeroCost);
                } else if decrease < cfg.cost_tol {
                    stop = Some(StopReason::CostTolerance);
                } else {
                    normal = normal_equations(rvec, tvec, corrs, k, &residuals)?;
                }
            }
            _ => {
                lambda *= cfg.lambda_up;
                if lambda > MAX_LAMBDA {
                    stop = Some(StopReason::NoFurtherDecrease);
                }
            }
        }
    }

    let stop_reason = stop.expect("loop exits with a reason");
    Ok(PnpSolution {
        rvec,
        tvec,
        rmse_px: (cost / residuals.len() as f64).sqrt(),
        iterations,
        accepted_steps,
        converged: stop_reason.converged(),
        stop_reason,
        cost_history,
        lambda_history,
    })
}

fn normal_equations(
    rvec: RotationVector,
    tvec: [f64; 3],
    corrs: &[Correspondence],
    k: &IntrinsicMatrix,
    residuals: &DVector<f64>,
) -> Result<(Matrix6<f64>, Vector6<f64>), PnpError> {
    let j = pose_jacobian(rvec, tvec, corrs, k)?;
    let jtj = j.tr_mul(&j);
    let jtr = j.tr_mul(residuals);
    Ok((Matrix6::from_fn(|r, c| jtj[(r, c)]), Vector6::from_fn(|r, _| jtr[r])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pnp::{reprojection_residuals, solve_pnp_linear};
    use crate::synth::{self, CalibrationScene};

    #[test]
    fn noiseless_converges_quickly() {
        let scene = CalibrationScene::standard();
        let corrs = scene.correspondences(0.0, 0);
        let init = solve_pnp_linear(&corrs, &scene.intrinsics).unwrap();
        let sol = refine_pnp_lm(&init, &corrs, &scene.intrinsics, &LmConfig::default()).unwrap();
        assert!(sol.converged);
        assert!(sol.rmse_px < 1e-6, "rmse {}", sol.rmse_px);
        assert!(sol.iterations <= 25, "iterations {}", sol.iterations);
        let (r, t) = synth::pose_error(&sol.extrinsic(), &scene.truth);
        assert!(r < 1e-6 && t < 1e-6);
    }

    #[test]
    fn recovers_from_a_perturbed_start() {
        let scene = CalibrationScene::standard();
        let corrs = scene.correspondences(0.0, 0);
        let start = crate::pnp::apply_fine_tune(
            &scene.truth,
            &crate::pnp::FineTuneDelta::new(RotationVector::new(0.05, -0.04, 0.03), [0.2, -0.1, 0.15]),
        );
        let sol = refine_pnp_lm(&start, &corrs, &scene.intrinsics, &LmConfig::default()).unwrap();
        assert!(sol.rmse_px < 1e-6);
        assert!(sol.cost_history.windows(2).all(|w| w[1] <= w[0]));
        assert!(sol.accepted_steps + 1 == sol.cost_history.len());
    }

    #[test]
    fn fixed_point_returns_immediately() {
        let scene = CalibrationScene::standard();
        let corrs = scene.correspondences(0.0, 0);
        let sol = refine_pnp_lm(&scene.truth, &corrs, &scene.intrinsics, &LmConfig::default()).unwrap();
        assert!(sol.converged);
        assert_eq!(sol.accepted_steps, 0);

        // noisy data: start from an optimum polished until the step vanishes
        let noisy = scene.correspondences(0.5, 9);
        let init = solve_pnp_linear(&noisy, &scene.intrinsics).unwrap();
        let polish = LmConfig { cost_tol: f64::MIN_POSITIVE, ..Default::default() };
        let first = refine_pnp_lm(&init, &noisy, &scene.intrinsics, &polish).unwrap();
        assert!(first.converged);
        let again = refine_pnp_lm(&first.extrinsic(), &noisy, &scene.intrinsics, &LmConfig::default()).unwrap();
        assert!(again.converged);
        assert_eq!(again.accepted_steps, 0, "{:?}", again.stop_reason);
        assert!((again.rmse_px - first.rmse_px).abs() < 1e-9);
    }

    #[test]
    fn rejected_steps_raise_lambda() {
        let scene = CalibrationScene::standard();
        let corrs = scene.correspondences(0.5, 1);
        let start = crate::pnp::apply_fine_tune(
            &scene.truth,
            &crate::pnp::FineTuneDelta::new(RotationVector::new(0.1, 0.1, -0.1), [0.3, 0.3, -0.3]),
        );
        let sol = refine_pnp_lm(&start, &corrs, &scene.intrinsics, &LmConfig::default()).unwrap();
        // λ only grows after a rejection and only shrinks after an acceptance
        let accepted = sol.cost_history.len() - 1;
        let grew = sol.lambda_history.windows(2).filter(|w| w[1] > w[0]).count();
        let shrank = sol.lambda_history.windows(2).filter(|w| w[1] < w[0]).count();
        assert!(shrank <= accepted);
        assert_eq!(grew + shrank, sol.lambda_history.len().saturating_sub(1));
        assert!(sol.cost_history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn max_iterations_is_not_an_error() {
        let scene = CalibrationScene::standard();
        let corrs = scene.correspondences(0.5, 2);
        let start = crate::pnp::apply_fine_tune(
            &scene.truth,
            &crate::pnp::FineTuneDelta::new(RotationVector::new(0.05, 0.0, 0.0), [0.1, 0.0, 0.0]),
        );
        let cfg = LmConfig { max_iters: 1, ..Default::default() };
        let sol = refine_pnp_lm(&start, &corrs, &scene.intrinsics, &cfg).unwrap();
        assert!(!sol.converged);
        assert_eq!(sol.stop_reason, StopReason::MaxIterations);
        let check = reprojection_residuals(&sol.extrinsic(), &corrs, &scene.intrinsics).unwrap();
        assert!((check.rmse_px - sol.rmse_px).abs() < 1e-9);
    }

    #[test]
    fn cancellation_is_polled() {
        let scene = CalibrationScene::standard();
        let corrs = scene.correspondences(0.5, 3);
        let start = crate::pnp::apply_fine_tune(
            &scene.truth,
            &crate::pnp::FineTuneDelta::new(RotationVector::new(0.05, 0.0, 0.0), [0.1, 0.0, 0.0]),
        );
        let mut polls = 0;
        let res = refine_pnp_lm_with_cancel(&start, &corrs, &scene.intrinsics, &LmConfig::default(), || {
            polls += 1;
            polls > 2
        });
        assert_eq!(res, Err(PnpError::Cancelled { iterations: 2 }));
    }

    #[test]
    fn config_validation() {
        assert!(LmConfig::default().validate().is_ok());
        assert!(LmConfig { lambda_up: 1.0, ..Default::default() }.validate().is_err());
        assert!(LmConfig { lambda_init: 0.0, ..Default::default() }.validate().is_err());
        assert!(LmConfig { max_iters: 0, ..Default::default() }.validate().is_err());
        assert!(LmConfig { step_tol: f64::NAN, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn permutation_invariance() {
        let scene = CalibrationScene::standard();
        let corrs = scene.correspondences(0.5, 4);
        let a = synth::solve(&corrs, &scene.intrinsics).unwrap();
        let mut shuffled = corrs.clone();
        shuffled.reverse();
        shuffled.rotate_left(5);
        let b = synth::solve(&shuffled, &scene.intrinsics).unwrap();
        let (r, t) = synth::pose_error(&a.extrinsic(), &b.extrinsic());
        assert!(r < 1e-9 && t < 1e-9, "{r} {t}");
    }
}
