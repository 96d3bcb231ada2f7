//! Linear resampling onto a shared uniform clock.
//!
//! The grid is anchored at t = 0 and indexed by integer frame, so tracks of
//! different vehicles align exactly and windowing can intersect frame ranges
//! without any float comparisons.

use std::collections::BTreeMap;

use super::TrajectoryRecord;

/// One vehicle's positions on the uniform grid; frame `k` is at `k * dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResampledTrack {
    pub vehicle_id: u64,
    pub start_frame: i64,
    pub dt: f64,
    pub points: Vec<(f64, f64)>,
}

impl ResampledTrack {
    pub fn end_frame(&self) -> i64 {
        self.start_frame + self.points.len() as i64
    }

    pub fn at_frame(&self, frame: i64) -> Option<(f64, f64)> {
        if frame < self.start_frame || frame >= self.end_frame() {
            return None;
        }
        Some(self.points[(frame - self.start_frame) as usize])
    }
}

/// Interpolates every vehicle's samples onto the `dt` grid. Extrapolation is
/// forbidden: only grid points inside a vehicle's observed span are emitted,
/// and single-sample vehicles are dropped.
pub fn resample(records: &[TrajectoryRecord], dt: f64) -> Vec<ResampledTrack> {
    assert!(dt > 0.0);
    let mut per_vehicle: BTreeMap<u64, Vec<&TrajectoryRecord>> = BTreeMap::new();
    for r in records {
        per_vehicle.entry(r.vehicle_id).or_default().push(r);
    }

    let eps = dt * 1e-6;
    let mut tracks = Vec::new();
    for (vehicle_id, samples) in per_vehicle {
        if samples.len() < 2 {
            continue;
        }
        let t0 = samples.first().unwrap().t;
        let t1 = samples.last().unwrap().t;
        let first_frame = ((t0 - eps) / dt).ceil() as i64;
        let last_frame = ((t1 + eps) / dt).floor() as i64;
        if last_frame < first_frame {
            continue;
        }
        let mut points = Vec::with_capacity((last_frame - first_frame + 1) as usize);
        let mut seg = 0usize;
        for frame in first_frame..=last_frame {
            let t = frame as f64 * dt;
            while seg + 2 < samples.len() && samples[seg + 1].t < t - eps {
                seg += 1;
            }
            let a = samples[seg];
            let b = samples[seg + 1];
            // Snap exact hits so already-uniform input reproduces itself.
            let point = if (t - a.t).abs() <= eps {
                (a.x, a.y)
            } else if (t - b.t).abs() <= eps {
                (b.x, b.y)
            } else {
                let alpha = (t - a.t) / (b.t - a.t);
                (a.x + alpha * (b.x - a.x), a.y + alpha * (b.y - a.y))
            };
            points.push(point);
        }
        tracks.push(ResampledTrack { vehicle_id, start_frame: first_frame, dt, points });
    }
    tracks
}
