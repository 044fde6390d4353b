use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Cursor};
use std::path::Path;

use image::{ImageFormat, RgbImage};
use scooter_fusion::fusion::{
    evaluate_tpr, parse_boards, parse_overlay_csv, project_cloud, render_overlay_with_radius, write_overlay_csv,
    write_report_csv, FusionError,
};
use scooter_fusion::geometry::CameraConfig;
use scooter_fusion::ingest::{
    decode_point_cloud, encode_point_cloud, packetize, parse_nmea, read_packets, synchronize, write_bag, BagReader,
    BagRecord, FixQuality, FrameAssembler, GgaFix, NmeaSentence, Recorder, TimedStream, Topic, TYPE_IMAGE_PNG, TYPE_NMEA,
    TYPE_POINT_CLOUD,
};
use scooter_fusion::kinematics::{parse_tracks, ttc_series, write_tracks_enu, write_ttc_csv, Track};
use scooter_fusion::pnp::{
    calibrate, parse_correspondences, parse_solution, write_correspondences, LmConfig, PnpError, SolutionFile,
};
use scooter_fusion::synth::EvaluationScene;
use scooter_fusion::PointCloudFrame;

use crate::args::*;
use crate::error::*;

pub fn run(cli: Cli) -> CliResult<u8> {
    match cli.command {
        Command::Calib(CalibCommand::Solve(a)) => calib_solve(&a),
        Command::Fuse(FuseCommand::Project(a)) => fuse_project(&a).map(|_| EXIT_OK),
        Command::Fuse(FuseCommand::EvalTpr(a)) => fuse_eval_tpr(&a).map(|_| EXIT_OK),
        Command::Ingest(IngestCommand::Nmea(a)) => ingest_nmea(&a).map(|_| EXIT_OK),
        Command::Ingest(IngestCommand::Assemble(a)) => ingest_assemble(&a).map(|_| EXIT_OK),
        Command::Sync(a) => sync(&a).map(|_| EXIT_OK),
        Command::Ttc(a) => ttc(&a).map(|_| EXIT_OK),
        Command::Serve(a) => crate::server::serve_blocking(a.bind, a.ui_dir).map(|_| EXIT_OK),
        Command::Synth(a) => synth(&a).map(|_| EXIT_OK),
    }
}

pub fn pnp_exit_code(e: &PnpError) -> u8 {
    match e {
        PnpError::TooFewPairs(_) | PnpError::DegenerateConfiguration { .. } | PnpError::BehindCamera { .. } => {
            EXIT_INFEASIBLE
        }
        PnpError::NumericalBreakdown { .. } => EXIT_NOT_CONVERGED,
        PnpError::InvalidConfig(_) => EXIT_USAGE,
        _ => EXIT_INPUT,
    }
}

fn camera_config(path: &Path) -> CliResult<CameraConfig> {
    let cfg: CameraConfig = read_text(path)?.parse().map_err(|e| CliError::in_file(path, e))?;
    cfg.pinhole().map_err(|e| CliError::in_file(path, e))?;
    Ok(cfg)
}

fn calib_solve(a: &SolveArgs) -> CliResult<u8> {
    let cfg = camera_config(&a.intrinsics)?;
    let corrs = parse_correspondences(&read_text(&a.pairs)?).map_err(|e| CliError::in_file(&a.pairs, e))?;
    let defaults = LmConfig::default();
    let lm = LmConfig {
        lambda_init: a.lambda_init.unwrap_or(defaults.lambda_init),
        max_iters: a.max_iters.unwrap_or(defaults.max_iters),
        cost_tol: a.cost_tol.unwrap_or(defaults.cost_tol),
        step_tol: a.step_tol.unwrap_or(defaults.step_tol),
        ..defaults
    };
    let sol = calibrate(&corrs, &cfg.intrinsics, &lm)
        .map_err(|e| CliError::new(pnp_exit_code(&e), format!("{}: {e}", a.pairs.display())))?;
    write_file(&a.out, SolutionFile::from(&sol).to_string())?;
    eprintln!(
        "{} pairs, rmse {:.6} px after {} iterations ({})",
        corrs.len(),
        sol.rmse_px,
        sol.iterations,
        sol.stop_reason.as_str()
    );
    if sol.converged {
        Ok(EXIT_OK)
    } else {
        eprintln!("warning: optimizer did not converge");
        Ok(EXIT_NOT_CONVERGED)
    }
}

/// The `index`-th point-cloud record of `topic`.
pub fn cloud_from_bag(bytes: &[u8], topic: &str, index: usize) -> Result<PointCloudFrame, String> {
    let reader = BagReader::new(bytes).map_err(|e| e.to_string())?;
    let id = reader.topic_by_name(topic).ok_or_else(|| format!("no topic `{topic}` in recording"))?.id;
    let mut seen = 0;
    for rec in reader {
        let rec = rec.map_err(|e| e.to_string())?;
        if rec.topic_id == id {
            if seen == index {
                return decode_point_cloud(rec.timestamp_ns, &rec.payload).map_err(|e| e.to_string());
            }
            seen += 1;
        }
    }
    Err(format!("topic `{topic}` has {seen} records; frame {index} requested"))
}

pub fn decode_png(bytes: &[u8]) -> Result<RgbImage, String> {
    image::load_from_memory_with_format(bytes, ImageFormat::Png).map(|i| i.to_rgb8()).map_err(|e| e.to_string())
}

pub fn encode_png(img: &RgbImage) -> Vec<u8> {
    let mut out = Cursor::new(Vec::new());
    img.write_to(&mut out, ImageFormat::Png).expect("PNG encoding to memory");
    out.into_inner()
}

fn fuse_project(a: &ProjectArgs) -> CliResult {
    let cfg = camera_config(&a.intrinsics)?;
    let solution = parse_solution(&read_text(&a.calib)?).map_err(|e| CliError::in_file(&a.calib, e))?;
    let frame = cloud_from_bag(&read_bytes(&a.bag)?, &a.topic, a.frame).map_err(|e| CliError::in_file(&a.bag, e))?;
    let overlay = project_cloud(&frame, &cfg.intrinsics, &solution.extrinsic(), cfg.image_width, cfg.image_height)
        .map_err(|e| CliError::input(e.to_string()))?;
    match a.out.extension().and_then(|e| e.to_str()) {
        Some("csv") => write_file(&a.out, write_overlay_csv(&overlay))?,
        Some("png") => {
            let path = a.image.as_ref().ok_or_else(|| CliError::new(EXIT_USAGE, "--image is required for a .png overlay"))?;
            let img = decode_png(&read_bytes(path)?).map_err(|e| CliError::in_file(path, e))?;
            let drawn = render_overlay_with_radius(&img, &overlay, a.radius).map_err(|e| CliError::in_file(path, e))?;
            write_file(&a.out, encode_png(&drawn))?;
        }
        _ => return Err(CliError::new(EXIT_USAGE, "--out must end in .png or .csv")),
    }
    eprintln!("{} of {} points in view", overlay.len(), frame.len());
    Ok(())
}

fn fuse_eval_tpr(a: &EvalTprArgs) -> CliResult {
    // The image size plays no part in scoring.
    let overlay = parse_overlay_csv(&read_text(&a.overlay)?, 0, 0).map_err(|e| CliError::in_file(&a.overlay, e))?;
    let boards = parse_boards(&read_text(&a.board)?).map_err(|e| CliError::in_file(&a.board, e))?;
    let mut reports = Vec::new();
    for b in &boards {
        match evaluate_tpr(&overlay, b, a.tolerance) {
            Ok(r) => reports.push(r),
            Err(e @ FusionError::NoPointsOnBoard { .. }) => return Err(CliError::new(EXIT_NO_POINTS, e.to_string())),
            Err(e @ FusionError::InvalidTolerance(_)) => return Err(CliError::new(EXIT_USAGE, e.to_string())),
            Err(e) => return Err(CliError::input(e.to_string())),
        }
    }
    let csv = write_report_csv(&reports);
    match &a.out {
        Some(p) => write_file(p, csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

pub const FIX_HEADER: &str = "line,sentence,utc_time_s,latitude,longitude,fix_quality,satellites,hdop,altitude_m,speed_knots";

fn ingest_nmea(a: &NmeaArgs) -> CliResult {
    let text = read_text(&a.input)?;
    let mut out = format!("{FIX_HEADER}\n");
    let mut warnings = 0;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        match parse_nmea(line) {
            Ok(NmeaSentence::Gga(g)) => {
                let _ = writeln!(
                    out,
                    "{line_no},GGA,{},{},{},{},{},{},{},",
                    g.utc_time,
                    g.latitude,
                    g.longitude,
                    g.fix_quality.name(),
                    g.satellites,
                    g.hdop,
                    g.altitude_m
                );
            }
            Ok(NmeaSentence::Rmc(r)) => {
                let _ = writeln!(out, "{line_no},RMC,{},{},{},,,,,{}", r.utc_time, r.latitude, r.longitude, r.speed_knots);
            }
            Err(e) => {
                warnings += 1;
                eprintln!("warning: {}:{line_no}: {e}", a.input.display());
            }
        }
    }
    write_file(&a.out, out)?;
    if warnings > 0 {
        eprintln!("{warnings} line(s) skipped");
    }
    Ok(())
}

fn ingest_assemble(a: &AssembleArgs) -> CliResult {
    let bytes = read_bytes(&a.packets)?;
    let file = File::create(&a.out).map_err(|e| CliError::in_file(&a.out, e))?;
    let topic = Topic::new(0, a.topic.clone(), TYPE_POINT_CLOUD);
    let recorder = Recorder::spawn(BufWriter::new(file), &[topic], 16).map_err(|e| CliError::in_file(&a.out, e))?;
    let producer = recorder.producer();
    let mut asm = FrameAssembler::new(a.reorder_window, a.timeout_ms * 1_000_000);
    let emit = |frames: Vec<PointCloudFrame>| {
        for f in frames {
            // The writer only goes away on an I/O error, reported at shutdown.
            let _ = producer.send(BagRecord::new(0, f.timestamp_ns, encode_point_cloud(&f)));
        }
    };
    let mut failure = None;
    for packet in read_packets(&bytes) {
        match packet {
            Ok(p) => emit(asm.push(p)),
            Err(e) => {
                failure = Some(CliError::in_file(&a.packets, e));
                break;
            }
        }
    }
    emit(asm.finish());
    let written = recorder.shutdown().map_err(|e| CliError::in_file(&a.out, e))?.1;
    if let Some(f) = failure {
        return Err(f);
    }
    let s = asm.stats();
    eprintln!(
        "{written} frames written; {} dropped, {} duplicate, {} late, {} inconsistent packets",
        s.frames_dropped, s.duplicate_packets, s.late_packets, s.inconsistent_packets
    );
    for d in &s.dropped {
        eprintln!("  dropped frame {}: {}/{} packets", d.frame_id, d.received, d.expected);
    }
    Ok(())
}

fn sync(a: &SyncArgs) -> CliResult {
    let bytes = read_bytes(&a.bag)?;
    let reader = BagReader::new(&bytes[..]).map_err(|e| CliError::in_file(&a.bag, e))?;
    let topics: Vec<Topic> = reader.topics().cloned().collect();
    let lidar = match &a.lidar_topic {
        Some(name) => topics.iter().find(|t| &t.name == name),
        None => topics.iter().find(|t| t.type_name == TYPE_POINT_CLOUD),
    }
    .ok_or_else(|| CliError::in_file(&a.bag, "no LiDAR topic"))?
    .clone();
    let mut stamps: Vec<(Topic, Vec<u64>)> = topics.iter().map(|t| (t.clone(), Vec::new())).collect();
    for rec in reader {
        let rec = rec.map_err(|e| CliError::in_file(&a.bag, e))?;
        if let Some((_, v)) = stamps.iter_mut().find(|(t, _)| t.id == rec.topic_id) {
            v.push(rec.timestamp_ns);
        }
    }
    let lidar_ts = stamps.iter().find(|(t, _)| t.id == lidar.id).map(|(_, v)| v.clone()).unwrap_or_default();
    let others: Vec<&(Topic, Vec<u64>)> = stamps.iter().filter(|(t, _)| t.id != lidar.id).collect();
    let streams: Vec<TimedStream<'_>> = others.iter().map(|(t, v)| TimedStream::new(&t.name, v)).collect();
    let result = synchronize(&lidar_ts, &streams, a.tolerance_ms * 1_000_000).map_err(|e| CliError::in_file(&a.bag, e))?;

    let mut out = String::from("lidar_index,lidar_timestamp_ns");
    for (t, _) in &others {
        let n = t.name.trim_start_matches('/');
        let _ = write!(out, ",{n}_index,{n}_timestamp_ns,{n}_skew_ns");
    }
    out.push('\n');
    for s in &result.samples {
        let _ = write!(out, "{},{}", s.lidar_index, s.timestamp_ns);
        for m in &s.matches {
            let _ = write!(out, ",{},{},{}", m.index, m.timestamp_ns, m.skew_ns);
        }
        out.push('\n');
    }
    write_file(&a.out, out)?;
    eprintln!("{} scans matched, {} skipped", result.samples.len(), result.skipped);
    Ok(())
}

fn ttc(a: &TtcArgs) -> CliResult {
    let (ida, idb) = a
        .pair
        .split_once(',')
        .map(|(x, y)| (x.trim(), y.trim()))
        .ok_or_else(|| CliError::new(EXIT_USAGE, "--pair must be `A,B`"))?;
    let tracks = parse_tracks(&read_text(&a.tracks)?, None).map_err(|e| CliError::in_file(&a.tracks, e))?;
    let find = |id: &str| -> CliResult<Track> {
        let t = tracks.iter().find(|t| t.id() == id).ok_or_else(|| CliError::in_file(&a.tracks, format!("no track `{id}`")))?;
        match a.smooth {
            Some(w) => t.smoothed(w).map_err(|e| CliError::new(EXIT_USAGE, e.to_string())),
            None => Ok(t.clone()),
        }
    };
    let (ta, tb) = (find(ida)?, find(idb)?);
    let reports = ttc_series(&ta, &tb).map_err(|e| CliError::input(e.to_string()))?;
    write_file(&a.out, write_ttc_csv(&reports))
}

/// First scan timestamp of synthetic recordings: 2020-09-13T12:26:40Z.
pub const SYNTH_T0_NS: u64 = 1_600_000_000_000_000_000;
const SCAN_PERIOD_NS: u64 = 100_000_000;

fn synth(a: &SynthArgs) -> CliResult {
    let idx = match a.camera {
        SceneCamera::Camera1 => 0,
        SceneCamera::Camera2 => 1,
        SceneCamera::Camera3 => 2,
    };
    let scene = EvaluationScene::reference_scenes()[idx].clone();
    let dir = &a.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| CliError::in_file(dir, e))?;
    let k = scene.intrinsics();
    let cfg = CameraConfig { intrinsics: k, distortion: Default::default(), image_width: scene.width, image_height: scene.height };
    write_file(&dir.join("intrinsics.cfg"), cfg.to_string())?;
    write_file(&dir.join("pairs.txt"), write_correspondences(&scene.calibration.correspondences(0.0, 0)))?;
    let png = encode_png(&scene.image());
    write_file(&dir.join("image.png"), &png)?;
    write_file(&dir.join("board.txt"), format!("# name ground_truth_m u1 v1 u2 v2 ...\n{}\n", scene.board_region()))?;

    let frames: Vec<PointCloudFrame> = (0..a.frames)
        .map(|i| scene.cloud(SYNTH_T0_NS + i as u64 * SCAN_PERIOD_NS, 0.01, i as u64))
        .collect();
    let mut nmea = String::new();
    let mut records = Vec::new();
    for (i, f) in frames.iter().enumerate() {
        let t = f.timestamp_ns;
        // GPS fix 10 ms after the scan, camera frame 30 ms after
        let fix = GgaFix {
            utc_time: ((t + 10_000_000) / 10_000_000 % 8_640_000) as f64 / 100.0,
            latitude: 39.768_403 + i as f64 * 1e-6,
            longitude: -86.158_068,
            fix_quality: FixQuality::RtkFixed,
            satellites: 14,
            hdop: 0.6,
            altitude_m: 218.0,
            geoid_separation_m: Some(-33.4),
        };
        let sentence = fix.to_sentence();
        nmea.push_str(&sentence);
        nmea.push_str("\r\n");
        records.push(BagRecord::new(0, t, encode_point_cloud(f)));
        records.push(BagRecord::new(2, t + 10_000_000, sentence.into_bytes()));
        records.push(BagRecord::new(1, t + 30_000_000, png.clone()));
    }
    let topics = [
        Topic::new(0, "/lidar", TYPE_POINT_CLOUD),
        Topic::new(1, format!("/{}", scene.camera), TYPE_IMAGE_PNG),
        Topic::new(2, "/gps", TYPE_NMEA),
    ];
    let bag = write_bag(&topics, &records).map_err(|e| CliError::input(e.to_string()))?;
    write_file(&dir.join("scene.bag"), bag)?;
    write_file(&dir.join("gps.nmea"), nmea)?;

    let mut packets = Vec::new();
    for (i, f) in frames.iter().enumerate() {
        for p in packetize(i as u32, f, 8, 50_000) {
            p.encode_into(&mut packets).map_err(|e| CliError::input(e.to_string()))?;
        }
    }
    write_file(&dir.join("packets.bin"), packets)?;

    // scooter and car 40 m apart, closing at 10 m/s
    let scooter = Track::linear("scooter", SYNTH_T0_NS, SCAN_PERIOD_NS, 30, [0.0, 0.0], [4.0, 0.0]);
    let car = Track::linear("car", SYNTH_T0_NS, SCAN_PERIOD_NS, 30, [40.0, 0.0], [-6.0, 0.0]);
    let tracks = [scooter, car].into_iter().collect::<Result<Vec<_>, _>>().map_err(|e| CliError::input(e.to_string()))?;
    write_file(&dir.join("tracks.csv"), write_tracks_enu(&tracks))?;
    eprintln!("wrote {} fixture set to {}", scene.camera, dir.display());
    Ok(())
}
