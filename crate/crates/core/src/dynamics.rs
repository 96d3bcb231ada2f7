//! Kinematic bicycle integration and the two-point steering law that tracks
//! a target lane centerline.

use serde::{Deserialize, Serialize};

use crate::scenario::VehicleState;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BicycleParams {
    /// Front axle to center of gravity [m].
    pub front_axle: f64,
    /// Rear axle to center of gravity [m].
    pub rear_axle: f64,
    /// Steering angle saturation [rad].
    pub max_steer: f64,
}

impl Default for BicycleParams {
    fn default() -> Self {
        BicycleParams { front_axle: 2.25, rear_axle: 2.25, max_steer: 0.6 }
    }
}

impl BicycleParams {
    /// Slip angle at the center of gravity for a given steering angle.
    pub fn slip_angle(&self, steer: f64) -> f64 {
        (self.rear_axle / (self.front_axle + self.rear_axle) * steer.tan()).atan()
    }

    /// Turn radius of the center of gravity under constant steering.
    pub fn turn_radius(&self, steer: f64) -> f64 {
        self.rear_axle / self.slip_angle(steer).sin()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ControlInput {
    /// Longitudinal acceleration [m/s²].
    pub accel: f64,
    /// Front steering angle [rad]; clamped to the bicycle's `max_steer`.
    pub steer: f64,
}

/// Explicit-Euler step of the kinematic bicycle model. Speed never goes
/// negative; the steering input saturates at `params.max_steer`.
pub fn bicycle_step(
    state: &VehicleState,
    control: ControlInput,
    params: &BicycleParams,
    dt: f64,
) -> VehicleState {
    debug_assert!(dt > 0.0);
    let steer = control.steer.clamp(-params.max_steer, params.max_steer);
    let slip = params.slip_angle(steer);
    let mut next = state.clone();
    next.x = state.x + state.speed * (state.heading + slip).cos() * dt;
    next.y = state.y + state.speed * (state.heading + slip).sin() * dt;
    next.heading = state.heading + state.speed / params.rear_axle * slip.sin() * dt;
    next.speed = (state.speed + control.accel * dt).max(0.0);
    next.accel = control.accel;
    next
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TwoPointParams {
    /// Near look-ahead distance (lane keeping) [m].
    pub near_distance: f64,
    /// Far look-ahead distance (anticipation) [m].
    pub far_distance: f64,
    pub k_near: f64,
    pub k_far: f64,
    /// Gain on the accumulated near-point angle.
    pub k_integral: f64,
}

impl Default for TwoPointParams {
    fn default() -> Self {
        // Gains sized for stable explicit-Euler tracking at dt = 0.1 s.
        TwoPointParams { near_distance: 10.0, far_distance: 50.0, k_near: 1.0, k_far: 2.5, k_integral: 0.2 }
    }
}

/// Bearing angles to the target centerline at the near and far look-ahead
/// points, measured from the vehicle heading.
pub fn look_ahead_angles(state: &VehicleState, target_lane_center: f64, params: &TwoPointParams) -> (f64, f64) {
    let near = (target_lane_center - state.y).atan2(params.near_distance) - state.heading;
    let far = (target_lane_center - state.y).atan2(params.far_distance) - state.heading;
    (near, far)
}

/// Stateless snapshot of the two-point law (zero accumulated term): the
/// steering angle a fresh controller would command.
pub fn two_point_steering(
    state: &VehicleState,
    target_lane_center: f64,
    params: &TwoPointParams,
    max_steer: f64,
) -> f64 {
    let (near, far) = look_ahead_angles(state, target_lane_center, params);
    (params.k_far * far + params.k_near * near).clamp(-max_steer, max_steer)
}

/// Two-point steering with the accumulated near-angle term. The accumulator
/// must be reset when the target lane changes.
#[derive(Debug, Clone, Default)]
pub struct TwoPointController {
    integral: f64,
}

impl TwoPointController {
    pub fn new() -> Self {
        TwoPointController::default()
    }

    pub fn reset(&mut self) {
        self.integral = 0.0;
    }

    /// Computes the steering command and advances the accumulated term by
    /// one step of length `dt`.
    pub fn control(
        &mut self,
        state: &VehicleState,
        target_lane_center: f64,
        params: &TwoPointParams,
        max_steer: f64,
        dt: f64,
    ) -> f64 {
        let (near, far) = look_ahead_angles(state, target_lane_center, params);
        let steer = params.k_far * far + params.k_near * near + params.k_integral * self.integral;
        self.integral += near * dt;
        steer.clamp(-max_steer, max_steer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{DriverKind, Role};

    fn vehicle(x: f64, y: f64, heading: f64, speed: f64) -> VehicleState {
        VehicleState {
            id: 0,
            x,
            y,
            heading,
            speed,
            accel: 0.0,
            lane_index: 0,
            length: 4.5,
            width: 2.5,
            desired_speed: 25.0,
            role: Role::Other,
            driver: DriverKind::RuleBased,
        }
    }

    #[test]
    fn straight_motion_keeps_lateral_state() {
        let v = vehicle(0.0, 2.0, 0.0, 10.0);
        let next = bicycle_step(&v, ControlInput { accel: 0.0, steer: 0.0 }, &BicycleParams::default(), 0.1);
        assert!((next.x - 1.0).abs() < 1e-12);
        assert_eq!(next.y, 2.0);
        assert_eq!(next.heading, 0.0);
        assert_eq!(next.speed, 10.0);
    }

    #[test]
    fn pure_acceleration_updates_speed() {
        let v = vehicle(0.0, 0.0, 0.0, 5.0);
        let next = bicycle_step(&v, ControlInput { accel: 1.0, steer: 0.0 }, &BicycleParams::default(), 0.1);
        assert!((next.speed - 5.1).abs() < 1e-12);
    }

    #[test]
    fn speed_never_goes_negative() {
        let mut v = vehicle(0.0, 0.0, 0.0, 0.5);
        let params = BicycleParams::default();
        for _ in 0..50 {
            v = bicycle_step(&v, ControlInput { accel: -20.0, steer: 0.3 }, &params, 0.1);
            assert!(v.speed >= 0.0);
        }
    }

    #[test]
    fn constant_steer_traces_analytic_circle() {
        let params = BicycleParams::default();
        let steer = 0.05;
        let radius = params.turn_radius(steer);
        let slip = params.slip_angle(steer);
        let v0 = vehicle(0.0, 0.0, 0.0, 10.0);
        // Circle center from the closed-form solution of the kinematic model.
        let cx = v0.x - radius * (v0.heading + slip).sin();
        let cy = v0.y + radius * (v0.heading + slip).cos();

        let mut v = v0;
        let dt = 1e-3;
        let mut worst = 0.0f64;
        for _ in 0..10_000 {
            v = bicycle_step(&v, ControlInput { accel: 0.0, steer }, &params, dt);
            let r = ((v.x - cx).powi(2) + (v.y - cy).powi(2)).sqrt();
            worst = worst.max((r - radius).abs() / radius);
        }
        assert!(worst < 0.01, "relative radius error {worst}");
    }

    #[test]
    fn straight_line_invariance_over_long_horizon() {
        let params = BicycleParams::default();
        let mut v = vehicle(0.0, 5.5, 0.0, 30.0);
        for _ in 0..5_000 {
            v = bicycle_step(&v, ControlInput { accel: 0.1, steer: 0.0 }, &params, 0.1);
            assert_eq!(v.y, 5.5);
            assert_eq!(v.heading, 0.0);
        }
    }

    #[test]
    fn centered_aligned_vehicle_steers_zero() {
        let v = vehicle(0.0, 6.0, 0.0, 20.0);
        let steer = two_point_steering(&v, 6.0, &TwoPointParams::default(), 0.6);
        assert_eq!(steer, 0.0);
    }

    #[test]
    fn offset_right_of_target_steers_left() {
        // Target centerline is 1 m to the left (+y) of the vehicle.
        let v = vehicle(0.0, 5.0, 0.0, 20.0);
        let steer = two_point_steering(&v, 6.0, &TwoPointParams::default(), 0.6);
        assert!(steer > 0.0);
    }

    #[test]
    fn heading_error_on_centerline_corrects_back() {
        let v = vehicle(0.0, 6.0, 0.1, 20.0);
        let steer = two_point_steering(&v, 6.0, &TwoPointParams::default(), 0.6);
        assert!(steer < 0.0);
    }

    #[test]
    fn closed_loop_converges_from_two_meter_offset() {
        let params = TwoPointParams::default();
        let bicycle = BicycleParams::default();
        let target = 6.0;
        let mut v = vehicle(0.0, target - 2.0, 0.0, 20.0);
        let mut controller = TwoPointController::new();
        let dt = 0.1;
        let mut reached_at = None;
        let mut max_error = 0.0f64;
        for step in 0..300 {
            let steer = controller.control(&v, target, &params, bicycle.max_steer, dt);
            v = bicycle_step(&v, ControlInput { accel: 0.0, steer }, &bicycle, dt);
            let err = (v.y - target).abs();
            max_error = max_error.max(err);
            if err < 0.1 && reached_at.is_none() {
                reached_at = Some(step as f64 * dt);
            }
        }
        let reached = reached_at.expect("never reached 0.1 m band");
        assert!(reached <= 10.0, "took {reached} s");
        assert!(max_error <= 2.5, "diverged to {max_error} m");
        assert!((v.y - target).abs() < 0.1, "did not stay converged");
    }
}
