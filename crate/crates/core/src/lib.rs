//! LiDAR–camera–GPS fusion toolkit for a wearable e-scooter sensor rig.
//!
//! The crate is organized by pipeline stage:
//!
//! * [`geometry`] – pinhole camera model, rigid transforms and Rodrigues
//!   rotations.
//! * [`pnp`] – extrinsic calibration from point/pixel correspondences: a
//!   linear (DLT) initialization refined by Levenberg–Marquardt, plus manual
//!   fine-tuning deltas.
//! * [`fusion`] – projecting whole point clouds onto images, drawing the
//!   overlay, and scoring fusion accuracy against poster-board ground truth.
//! * [`ingest`] – NMEA GPS parsing, UDP-style LiDAR frame reassembly, the
//!   recording container and multi-sensor time synchronization.
//! * [`kinematics`] – local metric frames, velocities and time-to-collision.
//! * [`synth`] – deterministic synthetic scenes used by tests, examples and
//!   the CLI fixtures.
//!
//! The guide in `book/` walks through each stage; its code listings are
//! compiled and run as doc-tests of this crate.

// `!(x > 0.0)` and friends are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cloud;
pub mod fusion;
pub mod geometry;
pub mod ingest;
pub mod kinematics;
pub mod pnp;
pub mod synth;

pub use cloud::{CloudPoint, PointCloudFrame};
pub use geometry::{
    project_camera_point, project_lidar_point, transform_point, ExtrinsicTransform, GeometryError,
    IntrinsicMatrix, PixelCoord, Point3D, RotationMatrix, RotationVector,
};

#[cfg(doctest)]
mod book;
