//! Deterministic synthetic scenes.
//!
//! A LiDAR sits at the origin of its frame (x forward, y left, z up) with up
//! to three cameras around it (x right, y down, z forward). Poster boards
//! stand upright facing the LiDAR. Everything is generated from a seed so
//! tests, the acceptance suite and the CLI fixtures agree exactly.

use std::f64::consts::PI;

use image::{Rgb, RgbImage};
use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::cloud::{CloudPoint, PointCloudFrame};
use crate::fusion::BoardRegion;
use crate::geometry::{
    project_lidar_point, rodrigues_to_matrix, transform_point, ExtrinsicTransform, IntrinsicMatrix, PixelCoord,
    Point3D, RotationMatrix, RotationVector,
};
use crate::pnp::{self, Correspondence, LmConfig, PnpError, PnpSolution};

/// 22 × 28 inch poster board, in meters.
pub const BOARD_WIDTH_M: f64 = 0.559;
pub const BOARD_HEIGHT_M: f64 = 0.711;

pub const IMAGE_WIDTH: u32 = 1280;
pub const IMAGE_HEIGHT: u32 = 720;

pub fn default_intrinsics() -> IntrinsicMatrix {
    IntrinsicMatrix::new(800.0, 800.0, 640.0, 360.0).expect("valid constants")
}

/// Camera pose looking along LiDAR bearing `yaw` (radians, counter-clockwise
/// from the LiDAR x axis), with a small mounting tilt and lever arm.
pub fn camera_pose(yaw: f64) -> ExtrinsicTransform {
    // LiDAR axes expressed in camera axes
    let axes = Matrix3::new(0.0, -1.0, 0.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0);
    let un_yaw = rodrigues_to_matrix(RotationVector::new(0.0, 0.0, -yaw));
    let tilt = rodrigues_to_matrix(RotationVector::new(0.021, -0.013, 0.008));
    let r = tilt.matrix() * axes * un_yaw.matrix();
    ExtrinsicTransform {
        rotation: RotationMatrix::nearest(&r).expect("product of rotations"),
        translation: [0.06, -0.11, -0.045],
    }
}

/// An upright board facing the LiDAR origin.
#[derive(Debug, Clone, PartialEq)]
pub struct PosterBoard {
    pub name: String,
    /// Horizontal distance from the LiDAR to the board center, meters.
    pub distance_m: f64,
    pub bearing_rad: f64,
    /// Center height relative to the LiDAR, meters.
    pub height_m: f64,
}

impl PosterBoard {
    pub fn new(name: impl Into<String>, distance_m: f64, bearing_rad: f64, height_m: f64) -> Self {
        Self { name: name.into(), distance_m, bearing_rad, height_m }
    }

    fn frame(&self) -> (Vector3<f64>, Vector3<f64>, Vector3<f64>) {
        let (s, c) = self.bearing_rad.sin_cos();
        let center = Vector3::new(c * self.distance_m, s * self.distance_m, self.height_m);
        let across = Vector3::new(-s, c, 0.0);
        (center, across, Vector3::z())
    }

    pub fn center(&self) -> Point3D {
        Point3D::from_vector(&self.frame().0)
    }

    /// Corners in the order top-left, top-right, bottom-right, bottom-left as
    /// seen from the LiDAR.
    pub fn corners(&self) -> [Point3D; 4] {
        let (c, across, up) = self.frame();
        let (hw, hh) = (BOARD_WIDTH_M / 2.0, BOARD_HEIGHT_M / 2.0);
        [
            c + across * hw + up * hh,
            c - across * hw + up * hh,
            c - across * hw - up * hh,
            c + across * hw - up * hh,
        ]
        .map(|v| Point3D::from_vector(&v))
    }

    /// Regular `cols × rows` grid over the board surface, edges included.
    pub fn surface_grid(&self, cols: usize, rows: usize) -> Vec<Point3D> {
        let (c, across, up) = self.frame();
        let mut pts = Vec::with_capacity(cols * rows);
        for r in 0..rows {
            for k in 0..cols {
                let a = (k as f64 / (cols - 1) as f64 - 0.5) * BOARD_WIDTH_M;
                let b = (0.5 - r as f64 / (rows - 1) as f64) * BOARD_HEIGHT_M;
                pts.push(Point3D::from_vector(&(c + across * a + up * b)));
            }
        }
        pts
    }
}

/// Calibration boards for a camera looking along `yaw`, one per distance,
/// spread sideways and vertically so they never overlap in the image.
pub fn calibration_boards(yaw: f64, distances: &[f64]) -> Vec<PosterBoard> {
    const LATERAL: [f64; 6] = [0.8, 0.0, -1.2, 1.6, -0.9, 2.4];
    const HEIGHT: [f64; 6] = [-0.2, 0.3, 0.0, 0.45, -0.35, 0.1];
    distances
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let bearing = yaw + (LATERAL[i % LATERAL.len()] / d).atan();
            PosterBoard::new(format!("board{}", i + 1), d, bearing, HEIGHT[i % HEIGHT.len()])
        })
        .collect()
}

/// Corner points of the default calibration layout facing the LiDAR x axis.
pub fn board_corner_points(distances: &[f64]) -> Vec<Point3D> {
    calibration_boards(0.0, distances).iter().flat_map(|b| b.corners()).collect()
}

/// Noise-free correspondences labelled `p0, p1, ...`.
pub fn correspondences_for(k: &IntrinsicMatrix, ext: &ExtrinsicTransform, pts: &[Point3D]) -> Vec<Correspondence> {
    pts.iter()
        .enumerate()
        .map(|(i, p)| {
            let px = project_lidar_point(k, ext, *p).expect("synthetic point in front of the camera");
            Correspondence::new(format!("p{i}"), px, *p)
        })
        .collect()
}

/// Rotation angle between the two rotations (radians) and the translation
/// distance (meters).
pub fn pose_error(a: &ExtrinsicTransform, b: &ExtrinsicTransform) -> (f64, f64) {
    let rel = a.rotation.matrix() * b.rotation.matrix().transpose();
    let rel = RotationMatrix::nearest(&rel).expect("relative rotation");
    let angle = pnp_angle(&rel);
    let dt = (a.translation_vector() - b.translation_vector()).norm();
    (angle, dt)
}

fn pnp_angle(r: &RotationMatrix) -> f64 {
    crate::geometry::matrix_to_rodrigues(r).map(|v| v.angle()).unwrap_or(PI)
}

/// Linear initialization plus LM with default settings.
pub fn solve(corrs: &[Correspondence], k: &IntrinsicMatrix) -> Result<PnpSolution, PnpError> {
    pnp::calibrate(corrs, k, &LmConfig::default())
}

/// Boards at known distances in front of one camera.
#[derive(Debug, Clone)]
pub struct CalibrationScene {
    pub intrinsics: IntrinsicMatrix,
    pub truth: ExtrinsicTransform,
    pub boards: Vec<PosterBoard>,
}

impl CalibrationScene {
    /// Three boards at 3, 6 and 9 m: 12 pairs.
    pub fn standard() -> Self {
        Self::new(0.0, &[3.0, 6.0, 9.0])
    }

    pub fn new(yaw: f64, distances: &[f64]) -> Self {
        Self { intrinsics: default_intrinsics(), truth: camera_pose(yaw), boards: calibration_boards(yaw, distances) }
    }

    pub fn corner_points(&self) -> Vec<Point3D> {
        self.boards.iter().flat_map(|b| b.corners()).collect()
    }

    /// Corner correspondences labelled `<board>_c<k>`, pixels perturbed by
    /// isotropic Gaussian noise of `sigma_px` (no noise when zero).
    pub fn correspondences(&self, sigma_px: f64, seed: u64) -> Vec<Correspondence> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, sigma_px.max(f64::MIN_POSITIVE)).expect("finite sigma");
        let mut out = Vec::new();
        for board in &self.boards {
            for (k, p) in board.corners().into_iter().enumerate() {
                let mut px = project_lidar_point(&self.intrinsics, &self.truth, p).expect("board in view");
                if sigma_px > 0.0 {
                    px.u += noise.sample(&mut rng);
                    px.v += noise.sample(&mut rng);
                }
                out.push(Correspondence::new(format!("{}_c{k}", board.name), px, p));
            }
        }
        out
    }
}

/// One camera/board pair used to score fusion accuracy.
#[derive(Debug, Clone)]
pub struct EvaluationScene {
    pub camera: String,
    pub calibration: CalibrationScene,
    pub board: PosterBoard,
    pub width: u32,
    pub height: u32,
}

impl EvaluationScene {
    pub fn new(camera: impl Into<String>, yaw: f64, board_distance_m: f64) -> Self {
        Self {
            camera: camera.into(),
            calibration: CalibrationScene::new(yaw, &[3.0, 6.0, 9.0]),
            board: PosterBoard::new("poster", board_distance_m, yaw + 0.04, 0.1),
            width: IMAGE_WIDTH,
            height: IMAGE_HEIGHT,
        }
    }

    /// Front camera with a board at 5.9 m, left camera at 3.8 m, right camera
    /// at 9.6 m.
    pub fn reference_scenes() -> [EvaluationScene; 3] {
        [
            EvaluationScene::new("camera1", 0.0, 5.9),
            EvaluationScene::new("camera2", PI / 3.0, 3.8),
            EvaluationScene::new("camera3", -PI / 3.0, 9.6),
        ]
    }

    pub fn intrinsics(&self) -> IntrinsicMatrix {
        self.calibration.intrinsics
    }

    pub fn truth(&self) -> ExtrinsicTransform {
        self.calibration.truth
    }

    /// The board outline in the image, from the true pose.
    pub fn board_region(&self) -> BoardRegion {
        let polygon: Vec<PixelCoord> = self
            .board
            .corners()
            .iter()
            .map(|p| project_lidar_point(&self.intrinsics(), &self.truth(), *p).expect("board in view"))
            .collect();
        BoardRegion::new(self.board.name.clone(), self.board.distance_m, polygon).expect("projected board is convex")
    }

    /// Board surface plus a background wall and ground plane. Background
    /// points the board hides from the camera are removed. `range_noise_m`
    /// perturbs every point along its LiDAR ray.
    pub fn cloud(&self, timestamp_ns: u64, range_noise_m: f64, seed: u64) -> PointCloudFrame {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points: Vec<Point3D> = self.board.surface_grid(14, 18);

        let region = self.board_region();
        let yaw = self.board.bearing_rad;
        let occluded = |p: &Point3D| {
            let cam = transform_point(&self.truth(), *p);
            cam.z > 0.0
                && project_lidar_point(&self.intrinsics(), &self.truth(), *p)
                    .map(|px| region.contains_with_margin(px, 4.0))
                    .unwrap_or(false)
                && p.norm() > self.board.distance_m
        };
        // wall 25 m out, spanning ±60° around the camera axis
        for i in 0..48 {
            for j in 0..14 {
                let bearing = yaw + (i as f64 / 47.0 - 0.5) * 2.0 * PI / 3.0;
                let z = -1.5 + j as f64 * 0.35;
                let p = Point3D::new(25.0 * bearing.cos(), 25.0 * bearing.sin(), z);
                if !occluded(&p) {
                    points.push(p);
                }
            }
        }
        // ground 1.2 m below the sensor
        for i in 0..40 {
            for j in 0..16 {
                let bearing = yaw + (i as f64 / 39.0 - 0.5) * 2.0 * PI / 3.0;
                let r = 2.0 + j as f64 * 1.1;
                let p = Point3D::new(r * bearing.cos(), r * bearing.sin(), -1.2);
                if !occluded(&p) {
                    points.push(p);
                }
            }
        }

        let noise = Normal::new(0.0, range_noise_m.max(f64::MIN_POSITIVE)).expect("finite sigma");
        let cloud = points
            .into_iter()
            .map(|p| {
                let p = if range_noise_m > 0.0 {
                    let r = p.norm();
                    p.scale((r + noise.sample(&mut rng)) / r)
                } else {
                    p
                };
                CloudPoint::new(p, rng.random_range(20..=220))
            })
            .collect();
        PointCloudFrame::new(timestamp_ns, cloud)
    }

    /// [`cloud`](Self::cloud) preceded by the calibration-board corners, so
    /// points `0..4 × boards` are the pick targets for a calibration session.
    pub fn calibration_cloud(&self, timestamp_ns: u64, range_noise_m: f64, seed: u64) -> PointCloudFrame {
        let mut frame = self.cloud(timestamp_ns, range_noise_m, seed);
        let corners = self.calibration.corner_points().into_iter().map(|p| CloudPoint::new(p, 255));
        frame.points.splice(0..0, corners);
        frame
    }

    /// Flat-shaded camera image: grey background, green poster board.
    pub fn image(&self) -> RgbImage {
        let region = self.board_region();
        RgbImage::from_fn(self.width, self.height, |x, y| {
            let px = PixelCoord::new(x as f64, y as f64);
            if region.contains(px) {
                Rgb([46, 139, 87])
            } else if y > self.height / 2 + 60 {
                Rgb([96, 96, 96])
            } else {
                Rgb([170, 180, 190])
            }
        })
    }
}
