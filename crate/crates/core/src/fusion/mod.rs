//! LiDAR-on-image fusion: project scans, draw the overlay, score accuracy.

mod board;
mod export;
mod project;
mod render;
mod tpr;

pub use board::{parse_boards, BoardRegion};
pub use export::{parse_overlay_csv, write_overlay_csv, write_report_csv, OVERLAY_HEADER, REPORT_HEADER};
pub use project::{project_cloud, OverlayPoint, OverlayResult};
pub use render::{render_overlay, render_overlay_with_radius, DEFAULT_DOT_RADIUS, DOT_COLOR};
pub use tpr::{evaluate_tpr, FusionReport, DEFAULT_TOLERANCE};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FusionError {
    #[error("image is {image_w}x{image_h} but the overlay was computed for {overlay_w}x{overlay_h}")]
    DimensionMismatch { image_w: u32, image_h: u32, overlay_w: u32, overlay_h: u32 },
    #[error("no projected points fall on board `{board}`")]
    NoPointsOnBoard { board: String },
    #[error("invalid board region: {0}")]
    InvalidBoard(String),
    #[error("tolerance fraction must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("image size must be positive, got {width}x{height}")]
    InvalidImageSize { width: u32, height: u32 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
