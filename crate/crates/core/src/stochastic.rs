//! Empirical lane-change behavior layer for background vehicles: a mean
//! lane-change rate extracted from recorded data, a linear per-step hazard,
//! a Gaussian duration model, and the maneuver machine that injects smooth
//! lane changes into otherwise lane-keeping trajectories.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::scenario::RoadConfig;

/// Mean lane-change rate observed in a dataset, in changes per vehicle per
/// kilometer: `(n / q) * (1000 / L)` for `n` observed changes among `q`
/// vehicles over `L` meters of road.
pub fn mean_lane_change_rate(changes: u64, vehicles: u64, road_length_m: f64) -> Result<f64, StatsError> {
    if vehicles == 0 {
        return Err(StatsError::NoVehicles);
    }
    if road_length_m <= 0.0 {
        return Err(StatsError::BadRoadLength(road_length_m));
    }
    Ok(changes as f64 / vehicles as f64 * (1000.0 / road_length_m))
}

#[derive(Debug, thiserror::Error)]
pub enum StatsError {
    #[error("vehicle count must be positive")]
    NoVehicles,
    #[error("road length must be positive, got {0}")]
    BadRoadLength(f64),
}

/// Probability of starting a lane change after `t` steps of lane keeping,
/// with mean-interval parameter `t_m` (in steps): `min(t / t_m, 1)`.
pub fn lane_change_probability(steps_since_change: u64, mean_interval_steps: f64) -> f64 {
    debug_assert!(mean_interval_steps > 0.0);
    (steps_since_change as f64 / mean_interval_steps).min(1.0)
}

/// Per-vehicle lane-change frequency parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LaneChangeStats {
    /// Changes per vehicle per kilometer.
    pub rate_per_veh_km: f64,
    /// Simulation step length the interval conversion assumes [s].
    pub dt: f64,
}

impl Default for LaneChangeStats {
    fn default() -> Self {
        LaneChangeStats { rate_per_veh_km: 0.2, dt: 0.1 }
    }
}

impl LaneChangeStats {
    /// Mean interval between changes in steps for a vehicle cruising at
    /// `mean_speed`: a rate of `r` per km at `v` m/s is `r*v/1000` changes
    /// per second, i.e. one change every `1000/(r*v*dt)` steps.
    pub fn mean_interval_steps(&self, mean_speed: f64) -> f64 {
        1000.0 / (self.rate_per_veh_km * mean_speed * self.dt)
    }
}

/// Gaussian lane-change duration with hard clipping.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DurationModel {
    pub mean: f64,
    pub std: f64,
    pub clip: [f64; 2],
}

impl Default for DurationModel {
    fn default() -> Self {
        DurationModel { mean: 5.0, std: 1.5, clip: [1.5, 10.0] }
    }
}

/// Draws a duration in seconds from the clipped Gaussian.
pub fn sample_lane_change_duration(model: &DurationModel, rng: &mut impl Rng) -> f64 {
    debug_assert!(model.mean > 0.0 && model.std >= 0.0);
    debug_assert!(model.clip[0] <= model.mean && model.mean <= model.clip[1]);
    let raw = if model.std == 0.0 {
        model.mean
    } else {
        let normal = Normal::new(model.mean, model.std).expect("finite mean/std");
        normal.sample(rng)
    };
    raw.clamp(model.clip[0], model.clip[1])
}

/// Quintic ease `6p^5 - 15p^4 + 10p^3`: 0 at 0, 1 at 1, with zero first and
/// second derivatives at both ends. Meaningful on [0, 1]; evaluated as the
/// raw polynomial elsewhere.
pub fn lateral_profile(progress: f64) -> f64 {
    let p = progress;
    ((6.0 * p - 15.0) * p + 10.0) * p * p * p
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManeuverPhase {
    Keeping,
    Changing,
}

/// Per-vehicle lane-keeping/lane-changing state machine.
#[derive(Debug, Clone)]
pub struct ManeuverState {
    pub phase: ManeuverPhase,
    /// Keeping steps since the last completed change.
    pub steps_since_last_change: u64,
    /// Lane the vehicle keeps to (or is leaving during a change).
    pub home_lane: usize,
    pub target_lane: usize,
    /// Fraction of the current change completed, monotone within a change.
    pub progress: f64,
    /// Duration of the current change [s].
    pub duration: f64,
    start_center: f64,
    target_center: f64,
}

impl ManeuverState {
    pub fn new(initial_lane: usize) -> Self {
        ManeuverState {
            phase: ManeuverPhase::Keeping,
            steps_since_last_change: 0,
            home_lane: initial_lane,
            target_lane: initial_lane,
            progress: 0.0,
            duration: 0.0,
            start_center: 0.0,
            target_center: 0.0,
        }
    }

    pub fn is_changing(&self) -> bool {
        self.phase == ManeuverPhase::Changing
    }
}

/// One decision step of the lane-change overlay. In the keeping phase the
/// step counter advances and a change may fire with the linear-hazard
/// probability toward a uniformly chosen existing neighbor lane; during a
/// change the progress advances by `dt/duration`. Returns the lateral target
/// (centerline blend) the vehicle should track this step.
pub fn overlay_lane_changes(
    maneuver: &mut ManeuverState,
    mean_speed: f64,
    road: &RoadConfig,
    stats: &LaneChangeStats,
    durations: &DurationModel,
    rng: &mut impl Rng,
    dt: f64,
) -> f64 {
    match maneuver.phase {
        ManeuverPhase::Keeping => {
            let lane = maneuver.home_lane;
            let mut neighbors: [usize; 2] = [0; 2];
            let mut count = 0;
            if lane + 1 < road.lane_count {
                neighbors[count] = lane + 1;
                count += 1;
            }
            if lane > 0 {
                neighbors[count] = lane - 1;
                count += 1;
            }
            if count == 0 {
                // Single-lane road: nothing to change into.
                return road.lane_center(lane);
            }
            maneuver.steps_since_last_change += 1;
            let t_m = stats.mean_interval_steps(mean_speed);
            let p = lane_change_probability(maneuver.steps_since_last_change, t_m);
            if rng.random_range(0.0..1.0) < p {
                let target = neighbors[rng.random_range(0..count)];
                maneuver.phase = ManeuverPhase::Changing;
                maneuver.target_lane = target;
                maneuver.progress = 0.0;
                maneuver.duration = sample_lane_change_duration(durations, rng);
                maneuver.start_center = road.lane_center(lane);
                maneuver.target_center = road.lane_center(target);
            }
            advance_change(maneuver, road, dt)
        }
        ManeuverPhase::Changing => advance_change(maneuver, road, dt),
    }
}

fn advance_change(maneuver: &mut ManeuverState, road: &RoadConfig, dt: f64) -> f64 {
    if maneuver.phase != ManeuverPhase::Changing {
        return road.lane_center(maneuver.home_lane);
    }
    maneuver.progress = (maneuver.progress + dt / maneuver.duration).min(1.0);
    let target = maneuver.start_center
        + lateral_profile(maneuver.progress) * (maneuver.target_center - maneuver.start_center);
    if maneuver.progress >= 1.0 {
        maneuver.phase = ManeuverPhase::Keeping;
        maneuver.home_lane = maneuver.target_lane;
        maneuver.steps_since_last_change = 0;
    }
    target
}
