use serde::{Deserialize, Serialize};

use super::{EnuPoint, KinematicsError};

/// A labeled trajectory with strictly increasing timestamps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Track {
    id: String,
    samples: Vec<EnuPoint>,
}

impl Track {
    pub fn new(id: impl Into<String>, samples: Vec<EnuPoint>) -> Result<Self, KinematicsError> {
        let id = id.into();
        if samples.is_empty() {
            return Err(KinematicsError::EmptyTrack(id));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(KinematicsError::NonFinite { track: id, index: i });
        }
        if let Some(i) = samples.windows(2).position(|w| w[1].timestamp_ns <= w[0].timestamp_ns) {
            return Err(KinematicsError::NotIncreasing { track: id, index: i + 1 });
        }
        Ok(Self { id, samples })
    }

    /// Constant-velocity track sampled every `step_ns`.
    pub fn linear(
        id: impl Into<String>,
        start_ns: u64,
        step_ns: u64,
        count: usize,
        start: [f64; 2],
        velocity: [f64; 2],
    ) -> Result<Self, KinematicsError> {
        let samples = (0..count as u64)
            .map(|k| {
                let dt = (k * step_ns) as f64 / 1e9;
                EnuPoint::new(start[0] + velocity[0] * dt, start[1] + velocity[1] * dt, 0.0, start_ns + k * step_ns)
            })
            .collect();
        Self::new(id, samples)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn samples(&self) -> &[EnuPoint] {
        &self.samples
    }

    pub fn span(&self) -> (u64, u64) {
        (self.samples[0].timestamp_ns, self.samples[self.samples.len() - 1].timestamp_ns)
    }

    fn check_span(&self, t: u64) -> Result<(), KinematicsError> {
        let (start, end) = self.span();
        if t < start || t > end {
            return Err(KinematicsError::OutOfSpan { track: self.id.clone(), t, start, end });
        }
        Ok(())
    }

    /// Index `i` of the interval `[t_i, t_{i+1}]` holding `t` (the last
    /// interval for `t` equal to the end time).
    fn interval(&self, t: u64) -> usize {
        let after = self.samples.partition_point(|s| s.timestamp_ns <= t);
        after.saturating_sub(1).min(self.samples.len().saturating_sub(2))
    }

    /// Horizontal position at `t`, linearly interpolated between samples.
    pub fn position_at(&self, t: u64) -> Result<[f64; 2], KinematicsError> {
        self.check_span(t)?;
        if self.samples.len() == 1 {
            return Ok(self.samples[0].horizontal());
        }
        Ok(self.interpolate(t as f64))
    }

    /// Piecewise-linear position at a (possibly fractional) time inside the span.
    fn interpolate(&self, t: f64) -> [f64; 2] {
        let i = self.interval(t as u64);
        let (a, b) = (&self.samples[i], &self.samples[i + 1]);
        let (ta, tb) = (a.timestamp_ns as f64, b.timestamp_ns as f64);
        let w = ((t - ta) / (tb - ta)).clamp(0.0, 1.0);
        [a.east_m + w * (b.east_m - a.east_m), a.north_m + w * (b.north_m - a.north_m)]
    }

    /// Horizontal velocity (east, north) in m/s at `t`.
    ///
    /// The step `h` is the length of the sample interval holding `t`; the
    /// derivative is `(p(t+h) − p(t−h)) / 2h` over the interpolated position,
    /// falling back to a one-sided difference where `t ± h` leaves the span.
    pub fn velocity_at(&self, t: u64) -> Result<[f64; 2], KinematicsError> {
        if self.samples.len() < 2 {
            return Err(KinematicsError::SingleSample(self.id.clone()));
        }
        self.check_span(t)?;
        let i = self.interval(t);
        let h = (self.samples[i + 1].timestamp_ns - self.samples[i].timestamp_ns) as f64;
        let (start, end) = self.span();
        let tf = t as f64;
        let lo = if tf - h >= start as f64 { tf - h } else { tf };
        let hi = if tf + h <= end as f64 { tf + h } else { tf };
        let (pl, ph) = (self.interpolate(lo), self.interpolate(hi));
        let dt = (hi - lo) / 1e9;
        Ok([(ph[0] - pl[0]) / dt, (ph[1] - pl[1]) / dt])
    }

    /// Moving-average smoothing of the sample positions with an odd window.
    /// The window shrinks symmetrically near the ends so straight-line motion
    /// is left untouched.
    pub fn smoothed(&self, window: usize) -> Result<Track, KinematicsError> {
        if window == 0 || window.is_multiple_of(2) {
            return Err(KinematicsError::InvalidWindow(window));
        }
        let n = self.samples.len();
        let half = window / 2;
        let samples = (0..n)
            .map(|i| {
                let k = half.min(i).min(n - 1 - i);
                let part = &self.samples[i - k..=i + k];
                let m = part.len() as f64;
                let mean = |f: fn(&EnuPoint) -> f64| part.iter().map(f).sum::<f64>() / m;
                EnuPoint::new(mean(|p| p.east_m), mean(|p| p.north_m), mean(|p| p.up_m), self.samples[i].timestamp_ns)
            })
            .collect();
        Track::new(self.id.clone(), samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const S: u64 = 1_000_000_000;

    #[test]
    fn validation() {
        assert!(matches!(Track::new("a", vec![]), Err(KinematicsError::EmptyTrack(_))));
        let p = |t| EnuPoint::new(0.0, 0.0, 0.0, t);
        assert!(matches!(Track::new("a", vec![p(1), p(1)]), Err(KinematicsError::NotIncreasing { index: 1, .. })));
        let single = Track::new("a", vec![p(5)]).unwrap();
        assert!(matches!(single.velocity_at(5), Err(KinematicsError::SingleSample(_))));
        assert_eq!(single.position_at(5).unwrap(), [0.0, 0.0]);
        assert!(matches!(single.position_at(6), Err(KinematicsError::OutOfSpan { .. })));
    }

    #[test]
    fn uniform_eastward_motion() {
        let tr = Track::linear("a", 0, S / 10, 51, [3.0, -1.0], [2.0, 0.0]).unwrap();
        for t in (0..=5 * S).step_by(37_000_000) {
            let v = tr.velocity_at(t).unwrap();
            assert!((v[0] - 2.0).abs() < 1e-9 && v[1].abs() < 1e-9, "t={t} v={v:?}");
        }
    }

    #[test]
    fn stationary_track() {
        let tr = Track::linear("a", 0, S, 5, [1.0, 1.0], [0.0, 0.0]).unwrap();
        assert_eq!(tr.velocity_at(2 * S + 5).unwrap(), [0.0, 0.0]);
    }

    #[test]
    fn quadratic_position_matches_analytic_derivative() {
        let step = 0.1;
        let samples = (0..=100)
            .map(|k| {
                let t = k as f64 * step;
                EnuPoint::new(t * t, 0.0, 0.0, (t * 1e9).round() as u64)
            })
            .collect();
        let tr = Track::new("q", samples).unwrap();
        for k in 10..=990 {
            let t = k as f64 * 0.01;
            let v = tr.velocity_at((t * 1e9).round() as u64).unwrap();
            assert!((v[0] - 2.0 * t).abs() <= step * step + 1e-6, "t={t} v={}", v[0]);
        }
        // one-sided at the ends: (h² − 0)/h = h
        assert!((tr.velocity_at(0).unwrap()[0] - step).abs() < 1e-9);
    }

    #[test]
    fn smoothing_preserves_lines_and_rejects_even_windows() {
        let tr = Track::linear("a", 0, S / 10, 20, [0.0, 0.0], [1.0, 2.0]).unwrap();
        let sm = tr.smoothed(5).unwrap();
        for (a, b) in tr.samples().iter().zip(sm.samples()) {
            assert!((a.east_m - b.east_m).abs() < 1e-12 && (a.north_m - b.north_m).abs() < 1e-12);
        }
        assert!(matches!(tr.smoothed(4), Err(KinematicsError::InvalidWindow(4))));
    }
}
