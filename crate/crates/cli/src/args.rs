use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// LiDAR/camera/GPS fusion pipelines for the e-scooter sensor rig.
///
/// Exit codes: 0 ok, 1 bad input or I/O, 2 calibration infeasible,
/// 3 no points on a scored board, 4 optimizer not converged, 64 usage.
#[derive(Debug, Parser)]
#[command(name = "scootfuse", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extrinsic calibration.
    #[command(subcommand)]
    Calib(CalibCommand),
    /// Point-cloud overlays and accuracy scoring.
    #[command(subcommand)]
    Fuse(FuseCommand),
    /// Sensor stream conversion.
    #[command(subcommand)]
    Ingest(IngestCommand),
    /// Match every recorded stream to the LiDAR scans.
    Sync(SyncArgs),
    /// Time-to-collision between two tracks.
    Ttc(TtcArgs),
    /// Run the calibration HTTP service.
    Serve(ServeArgs),
    /// Write a synthetic fixture set (scene, recording, pairs, tracks).
    Synth(SynthArgs),
}

#[derive(Debug, Subcommand)]
pub enum CalibCommand {
    /// Solve for the LiDAR-to-camera extrinsic from point/pixel pairs.
    Solve(SolveArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Pair file: `label u v X Y Z` per line.
    #[arg(long)]
    pub pairs: PathBuf,
    /// Camera intrinsics file (`key = value`).
    #[arg(long)]
    pub intrinsics: PathBuf,
    /// Solution file to write.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub lambda_init: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub cost_tol: Option<f64>,
    #[arg(long)]
    pub step_tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum FuseCommand {
    /// Project one recorded scan onto the image.
    Project(ProjectArgs),
    /// Score an overlay against ground-truth board regions.
    EvalTpr(EvalTprArgs),
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    #[arg(long)]
    pub bag: PathBuf,
    /// Point-cloud topic name.
    #[arg(long, default_value = "/lidar")]
    pub topic: String,
    /// Which scan of the topic, counting from 0.
    #[arg(long, default_value_t = 0)]
    pub frame: usize,
    /// Solution file from `calib solve`.
    #[arg(long)]
    pub calib: PathBuf,
    #[arg(long)]
    pub intrinsics: PathBuf,
    /// PNG to draw on; required for a `.png` output.
    #[arg(long)]
    pub image: Option<PathBuf>,
    /// `.png` for a rendered overlay, `.csv` for the pixel list.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub radius: u32,
}

#[derive(Debug, Args)]
pub struct EvalTprArgs {
    /// Overlay CSV from `fuse project`.
    #[arg(long)]
    pub overlay: PathBuf,
    /// Board file: `name ground_truth_m u1 v1 u2 v2 ...` per line.
    #[arg(long)]
    pub board: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    pub tolerance: f64,
    /// Report CSV; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum IngestCommand {
    /// Parse GGA/RMC sentences into a fix table.
    Nmea(NmeaArgs),
    /// Reassemble LiDAR frames from a packet capture into a recording.
    Assemble(AssembleArgs),
}

#[derive(Debug, Args)]
pub struct NmeaArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AssembleArgs {
    /// Concatenated LiDAR packets.
    #[arg(long)]
    pub packets: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "/lidar")]
    pub topic: String,
    #[arg(long, default_value_t = 8)]
    pub reorder_window: usize,
    #[arg(long, default_value_t = 200)]
    pub timeout_ms: u64,
}

#[derive(Debug, Args)]
pub struct SyncArgs {
    #[arg(long)]
    pub bag: PathBuf,
    #[arg(long, default_value_t = 50)]
    pub tolerance_ms: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Master topic; defaults to the first point-cloud topic.
    #[arg(long)]
    pub lidar_topic: Option<String>,
}

#[derive(Debug, Args)]
pub struct TtcArgs {
    /// Track CSV (`id,timestamp_ns,lat,lon,alt` or `id,timestamp_ns,east,north,up`).
    #[arg(long)]
    pub tracks: PathBuf,
    /// Two track ids, `A,B`; evaluated at A's sample times.
    #[arg(long)]
    pub pair: String,
    #[arg(long)]
    pub out: PathBuf,
    /// Odd moving-average window applied to both tracks.
    #[arg(long)]
    pub smooth: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub bind: SocketAddr,
    /// Built UI bundle to serve at `/`.
    #[arg(long)]
    pub ui_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SceneCamera {
    /// Front camera, board at 5.9 m.
    Camera1,
    /// Left camera, board at 3.8 m.
    Camera2,
    /// Right camera, board at 9.6 m.
    Camera3,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum, default_value_t = SceneCamera::Camera1)]
    pub camera: SceneCamera,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// LiDAR scans to record (10 Hz).
    #[arg(long, default_value_t = 10)]
    pub frames: usize,
}
