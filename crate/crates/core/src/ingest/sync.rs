//! Time synchronization with the LiDAR as master clock.
//!
//! For each LiDAR timestamp the nearest record of every other stream is
//! looked up; the earlier record wins ties. A LiDAR frame is emitted only
//! when every stream has a match within tolerance, otherwise it is skipped.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SyncError {
    #[error("stream `{stream}` is not sorted by timestamp at index {index}")]
    UnsortedInput { stream: String, index: usize },
}

/// Timestamps of one secondary stream (camera, GPS, ...).
#[derive(Debug, Clone, Copy)]
pub struct TimedStream<'a> {
    pub name: &'a str,
    pub timestamps: &'a [u64],
}

impl<'a> TimedStream<'a> {
    pub fn new(name: &'a str, timestamps: &'a [u64]) -> Self {
        Self { name, timestamps }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamMatch {
    /// Index into the stream's timestamp slice.
    pub index: usize,
    pub timestamp_ns: u64,
    pub skew_ns: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyncedSample {
    pub lidar_index: usize,
    pub timestamp_ns: u64,
    /// One match per secondary stream, in the order the streams were given.
    pub matches: Vec<StreamMatch>,
}

impl SyncedSample {
    pub fn max_skew_ns(&self) -> u64 {
        self.matches.iter().map(|m| m.skew_ns).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyncResult {
    pub samples: Vec<SyncedSample>,
    /// LiDAR frames with no in-tolerance match in at least one stream.
    pub skipped: usize,
}

fn check_sorted(name: &str, ts: &[u64]) -> Result<(), SyncError> {
    match ts.windows(2).position(|w| w[1] < w[0]) {
        Some(i) => Err(SyncError::UnsortedInput { stream: name.to_string(), index: i + 1 }),
        None => Ok(()),
    }
}

/// Nearest record to `t` in a sorted slice; ties go to the earlier record.
pub fn nearest(timestamps: &[u64], t: u64) -> Option<StreamMatch> {
    let after = timestamps.partition_point(|&x| x < t);
    let mut best: Option<StreamMatch> = None;
    if after > 0 {
        // first record of the run sharing the latest timestamp before `t`
        let ts = timestamps[after - 1];
        let index = timestamps.partition_point(|&x| x < ts);
        best = Some(StreamMatch { index, timestamp_ns: ts, skew_ns: t - ts });
    }
    if let Some(&ts) = timestamps.get(after) {
        let skew = ts - t;
        if best.is_none_or(|b| skew < b.skew_ns) {
            best = Some(StreamMatch { index: after, timestamp_ns: ts, skew_ns: skew });
        }
    }
    best
}

pub fn synchronize(lidar: &[u64], streams: &[TimedStream<'_>], tolerance_ns: u64) -> Result<SyncResult, SyncError> {
    check_sorted("lidar", lidar)?;
    for s in streams {
        check_sorted(s.name, s.timestamps)?;
    }
    let mut out = SyncResult::default();
    for (lidar_index, &t) in lidar.iter().enumerate() {
        let matches: Option<Vec<StreamMatch>> = streams
            .iter()
            .map(|s| nearest(s.timestamps, t).filter(|m| m.skew_ns <= tolerance_ns))
            .collect();
        match matches {
            Some(matches) => out.samples.push(SyncedSample { lidar_index, timestamp_ns: t, matches }),
            None => out.skipped += 1,
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MS: u64 = 1_000_000;

    fn ticks(start: u64, period: u64, n: usize) -> Vec<u64> {
        (0..n as u64).map(|k| start + k * period).collect()
    }

    #[test]
    fn aligned_streams_match_with_zero_skew() {
        let l = ticks(0, 100 * MS, 50);
        let r = synchronize(&l, &[TimedStream::new("cam", &l), TimedStream::new("gps", &l)], 50 * MS).unwrap();
        assert_eq!(r.samples.len(), 50);
        assert_eq!(r.skipped, 0);
        assert!(r.samples.iter().all(|s| s.max_skew_ns() == 0));
    }

    #[test]
    fn camera_offset_within_tolerance() {
        let l = ticks(0, 100 * MS, 20);
        let cam = ticks(30 * MS, 100 * MS, 20);
        let r = synchronize(&l, &[TimedStream::new("cam", &cam)], 50 * MS).unwrap();
        assert_eq!(r.samples.len(), 20);
        assert!(r.samples.iter().enumerate().all(|(i, s)| s.matches[0].skew_ns == 30 * MS && s.matches[0].index == i));
    }

    #[test]
    fn gps_gap_skips_the_frames_inside_it() {
        // 10 s of LiDAR at 10 Hz; GPS at 10 Hz but silent from 3.0 s to 5.0 s
        let l = ticks(0, 100 * MS, 100);
        let gps: Vec<u64> = l.iter().copied().filter(|&t| !(3000 * MS < t && t < 5000 * MS)).collect();
        let r = synchronize(&l, &[TimedStream::new("gps", &gps)], 50 * MS).unwrap();
        // frames at 3.1 .. 4.9 s are 100 ms or more from the nearest fix
        assert_eq!(r.skipped, 19);
        assert_eq!(r.samples.len(), 81);
    }

    #[test]
    fn ties_prefer_the_earlier_record() {
        let m = nearest(&[0, 10, 20], 15).unwrap();
        assert_eq!((m.index, m.skew_ns), (1, 5));
        let m = nearest(&[0, 10, 10, 20], 15).unwrap();
        assert_eq!(m.index, 1);
        assert_eq!(nearest(&[], 3), None);
        assert_eq!(nearest(&[7], 3).unwrap().skew_ns, 4);
    }

    #[test]
    fn unsorted_input_is_reported() {
        let err = synchronize(&[0, 10], &[TimedStream::new("cam0", &[0, 5, 3])], 1).unwrap_err();
        assert_eq!(err, SyncError::UnsortedInput { stream: "cam0".into(), index: 2 });
        assert!(matches!(synchronize(&[5, 1], &[], 1), Err(SyncError::UnsortedInput { index: 1, .. })));
    }

    #[test]
    fn skew_never_exceeds_tolerance() {
        let l = ticks(7, 100 * MS, 200);
        let cam = ticks(0, 33 * MS + 333, 600);
        let gps = ticks(3 * MS, 200 * MS, 100);
        let tol = 60 * MS;
        let r = synchronize(&l, &[TimedStream::new("cam", &cam), TimedStream::new("gps", &gps)], tol).unwrap();
        assert_eq!(r.samples.len() + r.skipped, l.len());
        assert!(r.samples.iter().all(|s| s.max_skew_ns() <= tol));
        assert!(r.samples.windows(2).all(|w| w[0].timestamp_ns < w[1].timestamp_ns));
    }
}
