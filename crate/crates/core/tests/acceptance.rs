//! Acceptance gate: one PASS/FAIL line per criterion. Run with
//! `cargo test -p scooter-fusion --test acceptance`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scooter_fusion::fusion::{evaluate_tpr, project_cloud, DEFAULT_TOLERANCE};
use scooter_fusion::geometry::{matrix_to_rodrigues, rodrigues_to_matrix, transform_point};
use scooter_fusion::ingest::{
    parse_nmea, read_bag, synchronize, write_bag, BagError, BagReader, BagRecord, FixQuality, NmeaError, NmeaSentence,
    TimedStream, Topic, RECORD_HEADER_LEN,
};
use scooter_fusion::kinematics::{ttc, Track};
use scooter_fusion::pnp::{
    calibrate, pose_jacobian, refine_pnp_lm, reprojection_residuals, solve_pnp_linear, LmConfig, PnpSolution,
};
use scooter_fusion::synth::{pose_error, CalibrationScene, EvaluationScene};
use scooter_fusion::{ExtrinsicTransform, IntrinsicMatrix, PointCloudFrame, Point3D, RotationVector};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// 1 ─────────────────────────────────────────────────────────────────────────

fn tpr_reproduction() -> Outcome {
    let start = Instant::now();
    let mut detail = Vec::new();
    for (i, scene) in EvaluationScene::reference_scenes().iter().enumerate() {
        let k = scene.intrinsics();
        let corrs = scene.calibration.correspondences(0.5, 100 + i as u64);
        let sol = calibrate(&corrs, &k, &LmConfig::default()).map_err(|e| e.to_string())?;
        let cloud = scene.cloud(1_000_000_000, 0.01, 7 + i as u64);
        let overlay = project_cloud(&cloud, &k, &sol.extrinsic(), scene.width, scene.height).map_err(|e| e.to_string())?;
        let report = evaluate_tpr(&overlay, &scene.board_region(), DEFAULT_TOLERANCE).map_err(|e| e.to_string())?;
        ensure!(report.tpr == 1.0, "{} at {} m: tpr {} ({} tp, {} wrong)", scene.camera, scene.board.distance_m, report.tpr, report.tp, report.wrong);
        detail.push(format!("{} {} m: {}/{}", scene.camera, scene.board.distance_m, report.tp, report.tp + report.wrong));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 10.0, "took {secs:.2} s");
    Ok(format!("TPR = 1.0 [{}] in {secs:.2} s", detail.join(", ")))
}

// 2 ─────────────────────────────────────────────────────────────────────────

fn pose_recovery() -> Outcome {
    let fixtures: [(f64, &[f64]); 3] =
        [(0.0, &[3.0, 6.0, 9.0]), (PI / 3.0, &[3.0, 4.5, 6.0, 7.5, 9.0]), (-PI / 3.0, &[3.0, 4.0, 5.0, 6.0, 7.0, 8.0])];
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for (yaw, distances) in fixtures {
        let scene = CalibrationScene::new(yaw, distances);
        let corrs = scene.correspondences(0.0, 0);
        ensure!((12..=24).contains(&corrs.len()), "fixture has {} pairs", corrs.len());
        let sol = calibrate(&corrs, &scene.intrinsics, &LmConfig::default()).map_err(|e| e.to_string())?;
        let (dr, dt) = pose_error(&sol.extrinsic(), &scene.truth);
        ensure!(dr < 1e-6 && dt < 1e-6 && sol.rmse_px < 1e-6, "{} pairs: rot {dr:e} rad, trans {dt:e} m, rmse {:e} px", corrs.len(), sol.rmse_px);
        worst = (worst.0.max(dr), worst.1.max(dt), worst.2.max(sol.rmse_px));
    }
    let scene = CalibrationScene::standard();
    let mut errors: Vec<f64> = (0..50)
        .map(|seed| {
            let sol = calibrate(&scene.correspondences(0.5, seed), &scene.intrinsics, &LmConfig::default())
                .map_err(|e| e.to_string())?;
            Ok(pose_error(&sol.extrinsic(), &scene.truth).1)
        })
        .collect::<Result<_, String>>()?;
    errors.sort_by(f64::total_cmp);
    let median = (errors[24] + errors[25]) / 2.0;
    ensure!(median < 0.05, "median translation error {median} m at 0.5 px");
    Ok(format!(
        "noiseless 12/20/24 pairs: rot {:.1e} rad, trans {:.1e} m, rmse {:.1e} px; σ=0.5 px median trans error {:.4} m",
        worst.0, worst.1, worst.2, median
    ))
}

// 3 ─────────────────────────────────────────────────────────────────────────

fn residual_vector(rvec: RotationVector, tvec: [f64; 3], scene: &CalibrationScene, corrs: &[scooter_fusion::pnp::Correspondence]) -> Vec<f64> {
    let ext = ExtrinsicTransform::from_rvec_tvec(rvec, tvec).expect("finite pose");
    reprojection_residuals(&ext, corrs, &scene.intrinsics).expect("in front").values
}

fn non_increasing(sol: &PnpSolution) -> bool {
    sol.cost_history.windows(2).all(|w| w[1] <= w[0])
}

fn lm_correctness() -> Outcome {
    let scene = CalibrationScene::standard();
    let corrs = scene.correspondences(0.5, 3);
    let mut r = rng(30);
    let truth = scene.truth.rotation_vector();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let mut p = |s: f64| r.random_range(-s..s);
        let rvec = RotationVector::new(truth.rx + p(0.2), truth.ry + p(0.2), truth.rz + p(0.2));
        let tvec = [scene.truth.translation[0] + p(0.2), scene.truth.translation[1] + p(0.2), scene.truth.translation[2] + p(0.2)];
        let jac = pose_jacobian(rvec, tvec, &corrs, &scene.intrinsics).map_err(|e| e.to_string())?;
        let h = 1e-6;
        for j in 0..6 {
            let shift = |d: f64| {
                let mut rv = rvec.to_array();
                let mut tv = tvec;
                if j < 3 { rv[j] += d } else { tv[j - 3] += d }
                residual_vector(RotationVector::new(rv[0], rv[1], rv[2]), tv, &scene, &corrs)
            };
            let (plus, minus) = (shift(h), shift(-h));
            for i in 0..plus.len() {
                let fd = (plus[i] - minus[i]) / (2.0 * h);
                let rel = (jac[(i, j)] - fd).abs() / fd.abs().max(jac[(i, j)].abs()).max(1.0);
                worst = worst.max(rel);
            }
        }
    }
    ensure!(worst < 1e-5, "Jacobian mismatch {worst:e}");

    // cost monotonicity on every fixture: noiseless, 50 noisy seeds, perturbed starts
    let mut fixtures = 0;
    let cfg = LmConfig::default();
    let noiseless = calibrate(&scene.correspondences(0.0, 0), &scene.intrinsics, &cfg).map_err(|e| e.to_string())?;
    ensure!(non_increasing(&noiseless), "noiseless cost rose: {:?}", noiseless.cost_history);
    fixtures += 1;
    for seed in 0..50 {
        let c = scene.correspondences(0.5, seed);
        let sol = calibrate(&c, &scene.intrinsics, &cfg).map_err(|e| e.to_string())?;
        ensure!(non_increasing(&sol), "seed {seed}: cost rose");
        fixtures += 1;
        let init = solve_pnp_linear(&c, &scene.intrinsics).map_err(|e| e.to_string())?;
        let rv = init.rotation_vector();
        let bumped = ExtrinsicTransform::from_rvec_tvec(
            RotationVector::new(rv.rx + 0.05, rv.ry - 0.04, rv.rz + 0.03),
            [init.translation[0] + 0.1, init.translation[1] - 0.1, init.translation[2] + 0.05],
        )
        .expect("finite");
        let sol = refine_pnp_lm(&bumped, &c, &scene.intrinsics, &cfg).map_err(|e| e.to_string())?;
        ensure!(non_increasing(&sol), "seed {seed} perturbed start: cost rose");
        fixtures += 1;
    }
    Ok(format!("Jacobian max relative error {worst:.1e} over 20 poses; cost non-increasing on {fixtures} fixtures"))
}

// 4 ─────────────────────────────────────────────────────────────────────────

fn projection_oracle() -> Outcome {
    let mut r = rng(40);
    let k = IntrinsicMatrix::new(800.0, 780.0, 640.0, 360.0).map_err(|e| e.to_string())?;
    let (w, h) = (1280u32, 720u32);
    let mut total = 0;
    for trial in 0..5 {
        let ext = ExtrinsicTransform::from_rvec_tvec(
            RotationVector::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)),
            [r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)],
        )
        .expect("finite");
        let pts: Vec<Point3D> =
            (0..1000).map(|_| Point3D::new(r.random_range(-20.0..20.0), r.random_range(-20.0..20.0), r.random_range(-20.0..20.0))).collect();
        let frame = PointCloudFrame::from_positions(0, pts.iter().copied());
        let got: Vec<usize> = project_cloud(&frame, &k, &ext, w, h).map_err(|e| e.to_string())?.projected.iter().map(|p| p.index).collect();
        // brute force: transform, depth test, pinhole, bounds
        let want: Vec<usize> = pts
            .iter()
            .enumerate()
            .filter(|(_, p)| {
                let c = transform_point(&ext, **p);
                if c.z <= 0.0 {
                    return false;
                }
                let (u, v) = (k.fx * c.x / c.z + k.ox, k.fy * c.y / c.z + k.oy);
                (0.0..w as f64).contains(&u) && (0.0..h as f64).contains(&v)
            })
            .map(|(i, _)| i)
            .collect();
        ensure!(got == want, "trial {trial}: {} projected vs {} by brute force", got.len(), want.len());
        total += got.len();
    }
    Ok(format!("5 × 1000 random points set-identical to brute force ({total} in view)"))
}

// 5 ─────────────────────────────────────────────────────────────────────────

const GGA: &str = "$GPGGA,123519,4807.038,N,01131.000,E,1,08,0.9,545.4,M,46.9,M,,*47";
const RMC: &str = "$GPRMC,123519,A,4807.038,N,01131.000,E,022.4,084.4,230394,003.1,W*6A";

fn nmea_parser() -> Outcome {
    let start = Instant::now();
    // golden values: dd + mm.mmm / 60
    let lat = 48.0 + 7.038 / 60.0;
    let lon = 11.0 + 31.0 / 60.0;
    match parse_nmea(GGA).map_err(|e| e.to_string())? {
        NmeaSentence::Gga(g) => {
            ensure!((g.latitude - lat).abs() < 1e-12 && (g.longitude - lon).abs() < 1e-12, "GGA position {g:?}");
            ensure!(g.fix_quality == FixQuality::Gps && g.satellites == 8 && g.altitude_m == 545.4 && g.hdop == 0.9, "GGA fields {g:?}");
            ensure!(g.utc_time == 12.0 * 3600.0 + 35.0 * 60.0 + 19.0, "GGA time {}", g.utc_time);
        }
        other => return Err(format!("GGA parsed as {other:?}")),
    }
    match parse_nmea(RMC).map_err(|e| e.to_string())? {
        NmeaSentence::Rmc(m) => {
            ensure!((m.latitude - lat).abs() < 1e-12 && (m.longitude - lon).abs() < 1e-12, "RMC position {m:?}");
            ensure!(m.active && m.speed_knots == 22.4 && m.date == (1994, 3, 23) && m.magnetic_variation_deg == Some(-3.1), "RMC fields {m:?}");
        }
        other => return Err(format!("RMC parsed as {other:?}")),
    }
    ensure!(matches!(parse_nmea(&GGA.replace("*47", "*00")), Err(NmeaError::BadChecksum { .. })), "*00 accepted");

    // every single-byte corruption between `$` and `*`, plus random-position
    // random-value mutations of both sentences
    let mut mutations = 0usize;
    let mut accepted = Vec::new();
    let mut check = |m: Vec<u8>| {
        mutations += 1;
        let s = String::from_utf8_lossy(&m).into_owned();
        if parse_nmea(&s).is_ok() {
            accepted.push(s);
        }
    };
    for golden in [GGA, RMC] {
        let bytes = golden.as_bytes();
        let star = golden.rfind('*').expect("star");
        for pos in 1..star {
            for flip in 1..=255u8 {
                let mut m = bytes.to_vec();
                m[pos] ^= flip;
                check(m);
            }
        }
    }
    let mut r = rng(50);
    for _ in 0..5000 {
        let golden = if r.random_bool(0.5) { GGA } else { RMC };
        let star = golden.rfind('*').expect("star");
        let mut m = golden.as_bytes().to_vec();
        let pos = r.random_range(1..star);
        let val: u8 = r.random();
        if val == m[pos] {
            continue;
        }
        m[pos] = val;
        check(m);
    }
    ensure!(accepted.is_empty(), "{} corruptions accepted, e.g. {}", accepted.len(), accepted[0]);
    ensure!(mutations >= 10_000, "only {mutations} mutations");
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 5.0, "took {secs:.2} s");
    Ok(format!("golden GGA/RMC match; {mutations} single-byte corruptions all rejected in {secs:.2} s"))
}

// 6 ─────────────────────────────────────────────────────────────────────────

fn bag_container() -> Outcome {
    let mut r = rng(60);
    let topics = vec![Topic::new(0, "/lidar", "sensor/PointCloud"), Topic::new(1, "/camera1", "camera/ImagePng"), Topic::new(9, "/gps", "gps/NmeaSentence")];
    for case in 0..1000 {
        let n = r.random_range(0..12);
        let records: Vec<BagRecord> = (0..n)
            .map(|_| {
                let id = [0u16, 1, 9][r.random_range(0..3)];
                let len = r.random_range(0..200);
                BagRecord::new(id, r.random(), (0..len).map(|_| r.random()).collect())
            })
            .collect();
        let bytes = write_bag(&topics, &records).map_err(|e| e.to_string())?;
        let (t, back) = read_bag(&bytes).map_err(|e| e.to_string())?;
        ensure!(t == topics && back == records, "case {case}: records differ");
        ensure!(write_bag(&t, &back).map_err(|e| e.to_string())? == bytes, "case {case}: bytes differ");
    }

    let golden: Vec<BagRecord> = (0..6u64).map(|i| BagRecord::new([0u16, 1, 9][i as usize % 3], 100_000_000 * i, vec![i as u8; 3 + i as usize])).collect();
    let bytes = write_bag(&topics, &golden).map_err(|e| e.to_string())?;
    let header_len = BagReader::new(&bytes[..]).map_err(|e| e.to_string())?.offset() as usize;
    let mut ends = vec![header_len];
    for rec in &golden {
        ends.push(ends.last().copied().unwrap_or(0) + RECORD_HEADER_LEN + rec.payload.len());
    }
    for cut in 0..=bytes.len() {
        let outcome = catch_unwind(|| {
            let reader = match BagReader::new(&bytes[..cut]) {
                Ok(reader) => reader,
                Err(BagError::TruncatedHeader { .. }) if cut < header_len => return Ok(()),
                Err(e) => return Err(format!("cut {cut}: {e}")),
            };
            let items: Vec<_> = reader.collect();
            let complete = ends.iter().filter(|&&e| e <= cut).count() - 1;
            let good: Vec<BagRecord> = items.iter().filter_map(|i| i.as_ref().ok().cloned()).collect();
            if good != golden[..complete] {
                return Err(format!("cut {cut}: recovered {} records, expected {complete}", good.len()));
            }
            let tail_ok = if ends.contains(&cut) {
                items.len() == complete
            } else {
                matches!(items.last(), Some(Err(BagError::TruncatedRecord { offset })) if *offset == ends[complete] as u64)
            };
            if tail_ok { Ok(()) } else { Err(format!("cut {cut}: wrong tail {:?}", items.last())) }
        });
        outcome.map_err(|_| format!("cut {cut}: reader panicked"))??;
    }
    Ok(format!("1000 random round-trips byte-exact; {} truncation offsets recover the complete prefix", bytes.len() + 1))
}

// 7 ─────────────────────────────────────────────────────────────────────────

const MS: u64 = 1_000_000;

fn ticks(start: u64, period: u64, n: u64) -> Vec<u64> {
    (0..n).map(|k| start + k * period).collect()
}

fn synchronization() -> Outcome {
    let lidar = ticks(0, 100 * MS, 600); // 60 s at 10 Hz
    let mut lines = Vec::new();
    let mut run = |name: &str, streams: &[TimedStream<'_>], tol: u64, matched: usize, skipped: usize, max_skew: u64| -> Result<(), String> {
        let r = synchronize(&lidar, streams, tol).map_err(|e| e.to_string())?;
        ensure!(r.samples.len() == matched && r.skipped == skipped, "{name}: {} matched / {} skipped, predicted {matched} / {skipped}", r.samples.len(), r.skipped);
        let skew = r.samples.iter().map(|s| s.max_skew_ns()).max().unwrap_or(0);
        ensure!(skew == max_skew, "{name}: max skew {skew} ns, predicted {max_skew}");
        ensure!(r.samples.windows(2).all(|w| w[0].timestamp_ns < w[1].timestamp_ns), "{name}: not in LiDAR order");
        lines.push(format!("{name} {matched}/{skipped}"));
        Ok(())
    };
    run("aligned", &[TimedStream::new("cam", &lidar), TimedStream::new("gps", &lidar)], 50 * MS, 600, 0, 0)?;

    let cam30 = ticks(30 * MS, 100 * MS, 600);
    run("camera +30 ms", &[TimedStream::new("cam", &cam30)], 50 * MS, 600, 0, 30 * MS)?;

    // GPS at 10 Hz, 50 ms after each scan, silent for 2 s (the 20 fixes from
    // 20.05 s to 21.95 s are missing). With 100 ms tolerance the scans
    // 20.1 .. 21.9 s (19) have no fix.
    let gps: Vec<u64> =
        ticks(50 * MS, 100 * MS, 600).into_iter().filter(|&t| !(20_050 * MS..=21_950 * MS).contains(&t)).collect();
    ensure!(gps.len() == 580, "gap fixture has {} fixes", gps.len());
    run("gps 2 s gap", &[TimedStream::new("cam", &cam30), TimedStream::new("gps", &gps)], 100 * MS, 581, 19, 50 * MS)?;

    // 30 Hz camera starting 5 ms late: nearest frame is always 5 ms away.
    let cam = ticks(5 * MS, 100 * MS / 3, 1800);
    run("30 Hz camera", &[TimedStream::new("cam", &cam)], 10 * MS, 600, 0, 5 * MS)?;

    // 1 Hz GPS with 400 ms tolerance: the x.5 s scans miss, as do
    // 59.5 .. 59.9 s after the last fix.
    let gps1 = ticks(0, 1000 * MS, 60);
    run("1 Hz gps", &[TimedStream::new("gps", &gps1)], 400 * MS, 536, 64, 400 * MS)?;

    // camera starts 3 s late and stops 2 s early
    let late = ticks(3000 * MS, 100 * MS, 550);
    run("camera window", &[TimedStream::new("cam", &late)], 50 * MS, 550, 50, 0)?;
    Ok(lines.join(", "))
}

// 8 ─────────────────────────────────────────────────────────────────────────

fn time_to_collision() -> Outcome {
    const S: u64 = 1_000_000_000;
    let a = Track::linear("ego", 0, S / 10, 101, [0.0, 0.0], [2.5, 0.0]).map_err(|e| e.to_string())?;
    let b = Track::linear("lead", 0, S / 10, 101, [20.0, 0.0], [-2.5, 0.0]).map_err(|e| e.to_string())?;
    let head_on = ttc(&a, &b, 0).map_err(|e| e.to_string())?;
    ensure!(head_on.ttc_s == Some(4.0), "head-on ttc {:?}", head_on.ttc_s);

    let mut r = rng(80);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let va = [r.random_range(-4.0..4.0), r.random_range(-4.0..4.0)];
        let pa = [r.random_range(-50.0..50.0), r.random_range(-50.0..50.0)];
        let heading: f64 = r.random_range(0.0..2.0 * PI);
        let (d, s) = (r.random_range(5.0..60.0), r.random_range(1.0..10.0));
        let u = [heading.cos(), heading.sin()];
        let pb = [pa[0] + d * u[0], pa[1] + d * u[1]];
        let vb = [va[0] - s * u[0], va[1] - s * u[1]];
        let step = S / 10;
        let ta = Track::linear("a", 0, step, 201, pa, va).map_err(|e| e.to_string())?;
        let tb = Track::linear("b", 0, step, 201, pb, vb).map_err(|e| e.to_string())?;
        let t_eval = r.random_range(0..20) * step;
        let rep = ttc(&ta, &tb, t_eval).map_err(|e| e.to_string())?;
        // dense oracle: advance both bodies from t_eval in 1 ms steps until first contact
        let t0 = t_eval as f64 / 1e9;
        let at = |p: [f64; 2], v: [f64; 2], t: f64| [p[0] + v[0] * t, p[1] + v[1] * t];
        let gap = |k: u64| {
            let t = t0 + k as f64 * 1e-3;
            let (x, y) = (at(pa, va, t), at(pb, vb, t));
            (y[0] - x[0]).hypot(y[1] - x[1])
        };
        let mut k = 0;
        while gap(k + 1) < gap(k) {
            k += 1;
        }
        ensure!(gap(k) < s * 1e-3, "encounter {i}: no contact in simulation");
        let contact = k as f64 * 1e-3;
        let ttc_s = rep.ttc_s.ok_or(format!("encounter {i}: not closing"))?;
        let rel = (ttc_s - contact).abs() / contact;
        ensure!(rel <= 0.01, "encounter {i}: ttc {ttc_s} vs simulated {contact}");
        worst = worst.max(rel);
    }
    Ok(format!("head-on ttc = 4.0 s; 20 closing encounters within {:.3}% of simulated contact", worst * 100.0))
}

// 9 ─────────────────────────────────────────────────────────────────────────

fn rodrigues_round_trip() -> Outcome {
    let mut r = rng(90);
    let (mut worst_rt, mut worst_orth) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        // uniform direction, angle in [0, π)
        let v = loop {
            let v = [r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0f64..1.0)];
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if n > 1e-3 && n <= 1.0 {
                let a = r.random_range(0.0..PI * 0.999) / n;
                break RotationVector::new(v[0] * a, v[1] * a, v[2] * a);
            }
        };
        let m = rodrigues_to_matrix(v);
        let (orth, det) = m.orthonormality();
        worst_orth = worst_orth.max(orth).max((det - 1.0).abs());
        let back = matrix_to_rodrigues(&m).map_err(|e| e.to_string())?;
        worst_rt = worst_rt.max((back.to_vector() - v.to_vector()).norm());
    }
    ensure!(worst_rt < 1e-9 && worst_orth < 1e-9, "round-trip {worst_rt:e}, orthonormality {worst_orth:e}");
    Ok(format!("100 vectors: round-trip error {worst_rt:.1e}, orthonormality error {worst_orth:.1e}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("TPR reproduction on 3.8/5.9/9.6 m boards", tpr_reproduction),
        ("pose recovery", pose_recovery),
        ("LM correctness", lm_correctness),
        ("projection oracle equivalence", projection_oracle),
        ("NMEA parser", nmea_parser),
        ("bag container", bag_container),
        ("synchronization at 10 Hz", synchronization),
        ("time-to-collision", time_to_collision),
        ("Rodrigues round-trip", rodrigues_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {}: {name} — {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}: {name} — {why}", i + 1);
            }
        }
    }
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
