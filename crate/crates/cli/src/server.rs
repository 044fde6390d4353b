//! Calibration-session HTTP service.
//!
//! Sessions live in memory. Every request that touches a session holds that
//! session's lock for its whole duration, so a solve and a fine-tune on the
//! same session never interleave; the later request waits. The JSON schema is
//! described in `openapi.json`, served at `/api/openapi.json`.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post, put};
use axum::{Json, Router};
use image::RgbImage;
use serde::{Deserialize, Serialize};
use tokio::sync::Mutex;

use scooter_fusion::fusion::{evaluate_tpr, project_cloud, render_overlay, BoardRegion, FusionError, FusionReport, OverlayResult};
use scooter_fusion::geometry::GeometryError;
use scooter_fusion::ingest::{assemble_frames, read_packets};
use scooter_fusion::pnp::{
    apply_fine_tune, calibrate, reprojection_residuals, Correspondence, FineTuneDelta, LmConfig, PnpError,
};
use scooter_fusion::{ExtrinsicTransform, IntrinsicMatrix, PixelCoord, Point3D, PointCloudFrame, RotationVector};

use crate::commands::{cloud_from_bag, decode_png, encode_png};
use crate::error::CliError;

pub const OPENAPI: &str = include_str!("../openapi.json");
/// Default subsample size for the scatter view.
pub const DEFAULT_MAX_POINTS: usize = 20_000;
const MAX_UPLOAD_BYTES: usize = 512 * 1024 * 1024;

#[derive(Debug, Clone, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    /// Name of the underlying error, e.g. `TooFewPairs`.
    pub error: String,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, error: &str, message: impl Into<String>) -> Self {
        Self { status, error: error.to_string(), message: message.into() }
    }

    fn bad_request(error: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, error, message)
    }

    fn conflict(error: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::CONFLICT, error, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

fn pnp_error(e: PnpError) -> ApiError {
    let name = match &e {
        PnpError::TooFewPairs(_) => "TooFewPairs",
        PnpError::DegenerateConfiguration { .. } => "DegenerateConfiguration",
        PnpError::BehindCamera { .. } => "BehindCamera",
        PnpError::NumericalBreakdown { .. } => "NumericalBreakdown",
        PnpError::NonFinite(_) => "NonFinite",
        PnpError::InvalidConfig(_) => "InvalidConfig",
        PnpError::Cancelled { .. } => "Cancelled",
    };
    match e {
        PnpError::TooFewPairs(_) => ApiError::conflict(name, e.to_string()),
        _ => ApiError::bad_request(name, e.to_string()),
    }
}

fn fusion_error(e: FusionError) -> ApiError {
    let name = match &e {
        FusionError::DimensionMismatch { .. } => "DimensionMismatch",
        FusionError::NoPointsOnBoard { .. } => "NoPointsOnBoard",
        FusionError::InvalidBoard(_) => "InvalidBoard",
        FusionError::InvalidTolerance(_) => "InvalidTolerance",
        FusionError::InvalidImageSize { .. } => "InvalidImageSize",
        FusionError::Parse { .. } => "Parse",
    };
    ApiError::bad_request(name, e.to_string())
}

fn geometry_error(e: GeometryError) -> ApiError {
    let name = match &e {
        GeometryError::BehindCamera { .. } => "BehindCamera",
        GeometryError::NotOrthonormal { .. } => "NotOrthonormal",
        GeometryError::InvalidIntrinsics(_) => "InvalidIntrinsics",
        GeometryError::NonFinite(_) => "NonFinite",
        GeometryError::NotSupported(_) => "NotSupported",
    };
    ApiError::bad_request(name, e.to_string())
}

// ── wire types ──────────────────────────────────────────────────────────────

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CreateSession {
    pub fx: f64,
    pub fy: f64,
    pub ox: f64,
    pub oy: f64,
    pub image_width: u32,
    pub image_height: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExtrinsicJson {
    pub rvec: [f64; 3],
    pub tvec: [f64; 3],
    /// Row-major rotation matrix.
    pub rotation: [[f64; 3]; 3],
}

impl From<&ExtrinsicTransform> for ExtrinsicJson {
    fn from(e: &ExtrinsicTransform) -> Self {
        Self { rvec: e.rotation_vector().to_array(), tvec: e.translation, rotation: e.rotation.rows() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionSummary {
    pub id: String,
    pub intrinsics: IntrinsicMatrix,
    pub image_width: u32,
    pub image_height: u32,
    pub cloud_points: Option<usize>,
    pub cloud_timestamp_ns: Option<u64>,
    pub image_loaded: bool,
    pub correspondences: usize,
    pub extrinsic: Option<ExtrinsicJson>,
    pub history_len: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CloudPointJson {
    pub index: usize,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub range_m: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CloudView {
    pub total_points: usize,
    pub stride: usize,
    pub points: Vec<CloudPointJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrespondenceJson {
    pub index: usize,
    pub label: String,
    /// Cloud index when the pair was picked from the uploaded scan.
    pub point_index: Option<usize>,
    pub lidar_point: Point3D,
    pub pixel: PixelCoord,
}

#[derive(Debug, Clone, Deserialize)]
pub struct AddCorrespondence {
    pub label: Option<String>,
    pub point_index: Option<usize>,
    pub lidar_point: Option<Point3D>,
    pub pixel: PixelCoord,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairResidual {
    pub label: String,
    pub du: f64,
    pub dv: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveResponse {
    pub extrinsic: ExtrinsicJson,
    pub rmse_px: f64,
    pub iterations: usize,
    pub converged: bool,
    pub stop_reason: String,
    pub residuals: Vec<PairResidual>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OverlayPointJson {
    pub index: usize,
    pub u: f64,
    pub v: f64,
    pub range_m: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OverlayJson {
    pub image_width: u32,
    pub image_height: u32,
    pub points: Vec<OverlayPointJson>,
}

impl From<&OverlayResult> for OverlayJson {
    fn from(o: &OverlayResult) -> Self {
        Self {
            image_width: o.image_width,
            image_height: o.image_height,
            points: o
                .projected
                .iter()
                .map(|p| OverlayPointJson { index: p.index, u: p.pixel.u, v: p.pixel.v, range_m: p.range_m })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FineTuneRequest {
    pub d_rvec: [f64; 3],
    pub d_tvec: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FineTuneResponse {
    pub extrinsic: ExtrinsicJson,
    /// Reprojection RMSE over the current pairs, when there are any.
    pub rmse_px: Option<f64>,
    /// Refreshed overlay, when a scan is loaded.
    pub overlay: Option<OverlayJson>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct TprRequest {
    pub name: Option<String>,
    pub ground_truth_range_m: f64,
    pub polygon: Vec<PixelCoord>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Snapshot {
    /// `solve` or `fine_tune`.
    pub source: String,
    pub extrinsic: ExtrinsicJson,
    pub rmse_px: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionExport {
    pub summary: SessionSummary,
    pub correspondences: Vec<CorrespondenceJson>,
    pub history: Vec<Snapshot>,
}

// ── state ───────────────────────────────────────────────────────────────────

#[derive(Debug)]
struct Pair {
    corr: Correspondence,
    point_index: Option<usize>,
}

#[derive(Debug)]
pub struct Session {
    id: String,
    intrinsics: IntrinsicMatrix,
    image_width: u32,
    image_height: u32,
    cloud: Option<PointCloudFrame>,
    image: Option<RgbImage>,
    pairs: Vec<Pair>,
    current: Option<ExtrinsicTransform>,
    history: Vec<Snapshot>,
}

impl Session {
    fn summary(&self) -> SessionSummary {
        SessionSummary {
            id: self.id.clone(),
            intrinsics: self.intrinsics,
            image_width: self.image_width,
            image_height: self.image_height,
            cloud_points: self.cloud.as_ref().map(|c| c.len()),
            cloud_timestamp_ns: self.cloud.as_ref().map(|c| c.timestamp_ns),
            image_loaded: self.image.is_some(),
            correspondences: self.pairs.len(),
            extrinsic: self.current.as_ref().map(ExtrinsicJson::from),
            history_len: self.history.len(),
        }
    }

    fn correspondences(&self) -> Vec<Correspondence> {
        self.pairs.iter().map(|p| p.corr.clone()).collect()
    }

    fn pair_json(&self, index: usize) -> CorrespondenceJson {
        let p = &self.pairs[index];
        CorrespondenceJson {
            index,
            label: p.corr.label.clone(),
            point_index: p.point_index,
            lidar_point: p.corr.lidar_point,
            pixel: p.corr.pixel,
        }
    }

    fn rmse(&self, ext: &ExtrinsicTransform) -> Option<f64> {
        if self.pairs.is_empty() {
            return None;
        }
        reprojection_residuals(ext, &self.correspondences(), &self.intrinsics).ok().map(|r| r.rmse_px)
    }

    fn overlay(&self) -> Result<OverlayResult, ApiError> {
        let ext = self.current.as_ref().ok_or_else(|| ApiError::conflict("NoExtrinsic", "solve the session first"))?;
        let cloud = self.cloud.as_ref().ok_or_else(|| ApiError::conflict("NoCloud", "upload a scan first"))?;
        project_cloud(cloud, &self.intrinsics, ext, self.image_width, self.image_height).map_err(fusion_error)
    }
}

#[derive(Debug, Default)]
pub struct AppState {
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
}

pub type SharedState = Arc<AppState>;

impl AppState {
    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.sessions
            .read()
            .expect("session map poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "UnknownSession", format!("no session `{id}`")))
    }
}

// ── handlers ────────────────────────────────────────────────────────────────

async fn openapi() -> impl IntoResponse {
    ([(header::CONTENT_TYPE, "application/json")], OPENAPI)
}

async fn create_session(
    State(state): State<SharedState>,
    Json(req): Json<CreateSession>,
) -> Result<(StatusCode, Json<SessionSummary>), ApiError> {
    let k = IntrinsicMatrix::new(req.fx, req.fy, req.ox, req.oy).map_err(geometry_error)?;
    if req.image_width == 0 || req.image_height == 0 {
        return Err(fusion_error(FusionError::InvalidImageSize { width: req.image_width, height: req.image_height }));
    }
    let id = uuid::Uuid::new_v4().simple().to_string();
    let session = Session {
        id: id.clone(),
        intrinsics: k,
        image_width: req.image_width,
        image_height: req.image_height,
        cloud: None,
        image: None,
        pairs: Vec::new(),
        current: None,
        history: Vec::new(),
    };
    let summary = session.summary();
    state.sessions.write().expect("session map poisoned").insert(id, Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(summary)))
}

async fn get_session(State(state): State<SharedState>, Path(id): Path<String>) -> Result<Json<SessionSummary>, ApiError> {
    let s = state.session(&id)?;
    let s = s.lock().await;
    Ok(Json(s.summary()))
}

async fn delete_session(State(state): State<SharedState>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    state.session(&id)?;
    state.sessions.write().expect("session map poisoned").remove(&id);
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Debug, Deserialize)]
struct CloudUpload {
    #[serde(default = "default_format")]
    format: String,
    #[serde(default = "default_topic")]
    topic: String,
    #[serde(default)]
    frame: usize,
}

fn default_format() -> String {
    "bag".into()
}

fn default_topic() -> String {
    "/lidar".into()
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CloudUploaded {
    pub points: usize,
    pub timestamp_ns: u64,
}

async fn upload_cloud(
    State(state): State<SharedState>,
    Path(id): Path<String>,
    Query(q): Query<CloudUpload>,
    body: Bytes,
) -> Result<Json<CloudUploaded>, ApiError> {
    let s = state.session(&id)?;
    let mut s = s.lock().await;
    let frame = match q.format.as_str() {
        "bag" => cloud_from_bag(&body, &q.topic, q.frame).map_err(|e| ApiError::bad_request("InvalidRecording", e))?,
        "packets" => {
            let packets = read_packets(&body)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| ApiError::bad_request("InvalidPacket", e.to_string()))?;
            let (frames, _) = assemble_frames(packets, 8, u64::MAX);
            let n = frames.len();
            frames
                .into_iter()
                .nth(q.frame)
                .ok_or_else(|| ApiError::bad_request("InvalidPacket", format!("{n} complete frames; frame {} requested", q.frame)))?
        }
        other => return Err(ApiError::bad_request("UnsupportedFormat", format!("format `{other}`; use bag or packets"))),
    };
    let out = CloudUploaded { points: frame.len(), timestamp_ns: frame.timestamp_ns };
    s.cloud = Some(frame);
    Ok(Json(out))
}

#[derive(Debug, Deserialize)]
struct CloudQuery {
    max_points: Option<usize>,
}

async fn get_cloud(
    State(state): State<SharedState>,
    Path(id): Path<String>,
    Query(q): Query<CloudQuery>,
) -> Result<Json<CloudView>, ApiError> {
    let s = state.session(&id)?;
    let s = s.lock().await;
    let cloud = s.cloud.as_ref().ok_or_else(|| ApiError::conflict("NoCloud", "upload a scan first"))?;
    let (stride, indices) = cloud.decimate(q.max_points.unwrap_or(DEFAULT_MAX_POINTS));
    let points = indices
        .into_iter()
        .map(|index| {
            let p = cloud.points[index].position;
            CloudPointJson { index, x: p.x, y: p.y, z: p.z, range_m: p.norm() }
        })
        .collect();
    Ok(Json(CloudView { total_points: cloud.len(), stride, points }))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ImageUploaded {
    pub width: u32,
    pub height: u32,
}

async fn upload_image(
    State(state): State<SharedState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<ImageUploaded>, ApiError> {
    let s = state.session(&id)?;
    let mut s = s.lock().await;
    let img = decode_png(&body).map_err(|e| ApiError::bad_request("InvalidImage", e))?;
    if img.dimensions() != (s.image_width, s.image_height) {
        return Err(fusion_error(FusionError::DimensionMismatch {
            image_w: img.width(),
            image_h: img.height(),
            overlay_w: s.image_width,
            overlay_h: s.image_height,
        }));
    }
    let out = ImageUploaded { width: img.width(), height: img.height() };
    s.image = Some(img);
    Ok(Json(out))
}

fn png_response(img: &RgbImage) -> Response {
    ([(header::CONTENT_TYPE, "image/png")], encode_png(img)).into_response()
}

async fn get_image(State(state): State<SharedState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let s = state.session(&id)?;
    let s = s.lock().await;
    let img = s.image.as_ref().ok_or_else(|| ApiError::conflict("NoImage", "upload an image first"))?;
    Ok(png_response(img))
}

async fn list_correspondences(
    State(state): State<SharedState>,
    Path(id): Path<String>,
) -> Result<Json<Vec<CorrespondenceJson>>, ApiError> {
    let s = state.session(&id)?;
    let s = s.lock().await;
    Ok(Json((0..s.pairs.len()).map(|i| s.pair_json(i)).collect()))
}

async fn add_correspondence(
    State(state): State<SharedState>,
    Path(id): Path<String>,
    Json(req): Json<AddCorrespondence>,
) -> Result<(StatusCode, Json<CorrespondenceJson>), ApiError> {
    let s = state.session(&id)?;
    let mut s = s.lock().await;
    let invalid = |m: &str| ApiError::bad_request("InvalidCorrespondence", m);
    let point = match (req.point_index, req.lidar_point) {
        (Some(i), None) => {
            let cloud = s.cloud.as_ref().ok_or_else(|| ApiError::conflict("NoCloud", "upload a scan first"))?;
            cloud.points.get(i).ok_or_else(|| invalid("point_index is outside the scan"))?.position
        }
        (None, Some(p)) => p,
        _ => return Err(invalid("give exactly one of point_index and lidar_point")),
    };
    if !point.is_finite() || !req.pixel.is_finite() {
        return Err(invalid("coordinates must be finite"));
    }
    let index = s.pairs.len();
    let label = req.label.unwrap_or_else(|| format!("pair{index}"));
    s.pairs.push(Pair { corr: Correspondence::new(label, req.pixel, point), point_index: req.point_index });
    Ok((StatusCode::CREATED, Json(s.pair_json(index))))
}

async fn delete_correspondence(
    State(state): State<SharedState>,
    Path((id, index)): Path<(String, usize)>,
) -> Result<Json<Vec<CorrespondenceJson>>, ApiError> {
    let s = state.session(&id)?;
    let mut s = s.lock().await;
    if index >= s.pairs.len() {
        return Err(ApiError::new(StatusCode::NOT_FOUND, "UnknownCorrespondence", format!("no correspondence {index}")));
    }
    s.pairs.remove(index);
    Ok(Json((0..s.pairs.len()).map(|i| s.pair_json(i)).collect()))
}

async fn solve(
    State(state): State<SharedState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<SolveResponse>, ApiError> {
    let cfg: LmConfig = if body.iter().all(u8::is_ascii_whitespace) {
        LmConfig::default()
    } else {
        serde_json::from_slice(&body).map_err(|e| ApiError::bad_request("InvalidConfig", e.to_string()))?
    };
    let s = state.session(&id)?;
    let mut s = s.lock().await;
    let corrs = s.correspondences();
    let sol = calibrate(&corrs, &s.intrinsics, &cfg).map_err(pnp_error)?;
    let ext = sol.extrinsic();
    let residuals = reprojection_residuals(&ext, &corrs, &s.intrinsics).map_err(pnp_error)?;
    let residuals = corrs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let (du, dv) = residuals.pair(i);
            PairResidual { label: c.label.clone(), du, dv }
        })
        .collect();
    s.current = Some(ext);
    s.history.push(Snapshot { source: "solve".into(), extrinsic: (&ext).into(), rmse_px: Some(sol.rmse_px) });
    Ok(Json(SolveResponse {
        extrinsic: (&ext).into(),
        rmse_px: sol.rmse_px,
        iterations: sol.iterations,
        converged: sol.converged,
        stop_reason: sol.stop_reason.as_str().into(),
        residuals,
    }))
}

async fn fine_tune(
    State(state): State<SharedState>,
    Path(id): Path<String>,
    Json(req): Json<FineTuneRequest>,
) -> Result<Json<FineTuneResponse>, ApiError> {
    let delta = FineTuneDelta::new(RotationVector::new(req.d_rvec[0], req.d_rvec[1], req.d_rvec[2]), req.d_tvec);
    if !delta.is_valid() {
        return Err(ApiError::bad_request("InvalidDelta", "rotation delta must be finite with angle below π"));
    }
    let s = state.session(&id)?;
    let mut s = s.lock().await;
    let current = s.current.ok_or_else(|| ApiError::conflict("NoExtrinsic", "solve the session first"))?;
    let ext = apply_fine_tune(&current, &delta);
    s.current = Some(ext);
    let rmse_px = s.rmse(&ext);
    s.history.push(Snapshot { source: "fine_tune".into(), extrinsic: (&ext).into(), rmse_px });
    let overlay = match &s.cloud {
        Some(_) => Some(OverlayJson::from(&s.overlay()?)),
        None => None,
    };
    Ok(Json(FineTuneResponse { extrinsic: (&ext).into(), rmse_px, overlay }))
}

async fn get_overlay(State(state): State<SharedState>, Path(id): Path<String>) -> Result<Json<OverlayJson>, ApiError> {
    let s = state.session(&id)?;
    let s = s.lock().await;
    Ok(Json(OverlayJson::from(&s.overlay()?)))
}

async fn get_overlay_png(State(state): State<SharedState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let s = state.session(&id)?;
    let s = s.lock().await;
    let overlay = s.overlay()?;
    let img = s.image.as_ref().ok_or_else(|| ApiError::conflict("NoImage", "upload an image first"))?;
    let drawn = render_overlay(img, &overlay).map_err(fusion_error)?;
    Ok(png_response(&drawn))
}

async fn evaluate(
    State(state): State<SharedState>,
    Path(id): Path<String>,
    Json(req): Json<TprRequest>,
) -> Result<Json<FusionReport>, ApiError> {
    let board = BoardRegion::new(req.name.unwrap_or_else(|| "board".into()), req.ground_truth_range_m, req.polygon)
        .map_err(fusion_error)?;
    let s = state.session(&id)?;
    let s = s.lock().await;
    let overlay = s.overlay()?;
    let report = evaluate_tpr(&overlay, &board, req.tolerance.unwrap_or(scooter_fusion::fusion::DEFAULT_TOLERANCE))
        .map_err(fusion_error)?;
    Ok(Json(report))
}

async fn history(State(state): State<SharedState>, Path(id): Path<String>) -> Result<Json<Vec<Snapshot>>, ApiError> {
    let s = state.session(&id)?;
    let s = s.lock().await;
    Ok(Json(s.history.clone()))
}

async fn export(State(state): State<SharedState>, Path(id): Path<String>) -> Result<Json<SessionExport>, ApiError> {
    let s = state.session(&id)?;
    let s = s.lock().await;
    Ok(Json(SessionExport {
        summary: s.summary(),
        correspondences: (0..s.pairs.len()).map(|i| s.pair_json(i)).collect(),
        history: s.history.clone(),
    }))
}

pub fn router(state: SharedState) -> Router {
    Router::new()
        .route("/api/openapi.json", get(openapi))
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}", get(get_session).delete(delete_session))
        .route("/api/sessions/{id}/cloud", put(upload_cloud).get(get_cloud))
        .route("/api/sessions/{id}/image", put(upload_image).get(get_image))
        .route("/api/sessions/{id}/correspondences", get(list_correspondences).post(add_correspondence))
        .route("/api/sessions/{id}/correspondences/{index}", delete(delete_correspondence))
        .route("/api/sessions/{id}/solve", post(solve))
        .route("/api/sessions/{id}/fine-tune", post(fine_tune))
        .route("/api/sessions/{id}/overlay", get(get_overlay))
        .route("/api/sessions/{id}/overlay.png", get(get_overlay_png))
        .route("/api/sessions/{id}/tpr", post(evaluate))
        .route("/api/sessions/{id}/history", get(history))
        .route("/api/sessions/{id}/export", get(export))
        .layer(DefaultBodyLimit::max(MAX_UPLOAD_BYTES))
        .with_state(state)
}

/// API routes plus, optionally, the UI bundle served from `ui_dir`.
pub fn app(ui_dir: Option<PathBuf>) -> Router {
    let api = router(SharedState::default());
    match ui_dir {
        Some(dir) => api.fallback_service(tower_http::services::ServeDir::new(dir)),
        None => api,
    }
}

pub fn serve_blocking(bind: SocketAddr, ui_dir: Option<PathBuf>) -> Result<(), CliError> {
    let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::input(e.to_string()))?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(bind).await.map_err(|e| CliError::input(format!("{bind}: {e}")))?;
        eprintln!("listening on http://{}", listener.local_addr().map_err(|e| CliError::input(e.to_string()))?);
        axum::serve(listener, app(ui_dir))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| CliError::input(e.to_string()))
    })
}
