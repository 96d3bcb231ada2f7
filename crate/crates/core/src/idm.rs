//! Intelligent Driver Model longitudinal controller.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IdmParams {
    /// Minimum gap [m].
    pub min_gap: f64,
    /// Safe time headway [s].
    pub time_headway: f64,
    /// Desired (comfortable) deceleration [m/s²].
    pub desired_decel: f64,
    /// Gap substituted when the lane ahead is empty [m].
    pub empty_lane_gap: f64,
    /// Acceleration floor [m/s²].
    pub min_accel: f64,
    /// Acceleration ceiling [m/s²].
    pub max_accel: f64,
    /// Free-road acceleration exponent.
    pub accel_exponent: f64,
}

impl Default for IdmParams {
    fn default() -> Self {
        IdmParams {
            min_gap: 2.0,
            time_headway: 1.6,
            desired_decel: 1.7,
            empty_lane_gap: 10_000.0,
            min_accel: -20.0,
            max_accel: 0.7,
            accel_exponent: 4.0,
        }
    }
}

impl IdmParams {
    /// Desired dynamic gap `s*` for the current speed and closing speed.
    /// The dynamic part is floored at zero so a fast-receding leader cannot
    /// shrink the desired gap below the standstill minimum (this also keeps
    /// the acceleration monotone in the closing speed).
    pub fn desired_gap(&self, speed: f64, closing_speed: f64) -> f64 {
        let dynamic = speed * self.time_headway
            + speed * closing_speed / (2.0 * (self.max_accel * self.desired_decel).sqrt());
        self.min_gap + dynamic.max(0.0)
    }
}

/// IDM acceleration for a vehicle at `speed` wanting `desired_speed`, with a
/// bumper gap `gap` to its leader closing at `closing_speed` (positive when
/// approaching). Use `params.empty_lane_gap` when there is no leader.
/// The caller must have resolved `gap <= 0` as a crash already; the gap is
/// floored at a small positive value so the output stays finite.
pub fn idm_acceleration(
    speed: f64,
    desired_speed: f64,
    gap: f64,
    closing_speed: f64,
    params: &IdmParams,
) -> f64 {
    debug_assert!(desired_speed > 0.0);
    let gap = gap.max(1e-3);
    let free_term = (speed / desired_speed).powf(params.accel_exponent);
    let interaction = params.desired_gap(speed, closing_speed) / gap;
    let accel = params.max_accel * (1.0 - free_term - interaction * interaction);
    accel.clamp(params.min_accel, params.max_accel)
}
