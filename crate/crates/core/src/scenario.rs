//! Highway world state: road geometry, vehicle population, seeded
//! initialization, fixed-step advancement and collision detection.
//!
//! Coordinates: `x` runs along the road, `y` is lateral with 0 at the right
//! road edge. Lane 0 is the rightmost lane; "left" means increasing `y`.

use std::io::Write;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{bicycle_step, BicycleParams, ControlInput};
use crate::seeding::{derive_rng, stream};

pub const DEFAULT_VEHICLE_LENGTH: f64 = 4.5;
pub const DEFAULT_VEHICLE_WIDTH: f64 = 2.5;
pub const DEFAULT_LANE_WIDTH: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Ego,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriverKind {
    RuleBased,
    Generative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VehicleState {
    pub id: u64,
    /// Longitudinal position of the vehicle center [m].
    pub x: f64,
    /// Lateral position of the vehicle center, 0 at the right road edge [m].
    pub y: f64,
    /// Heading relative to the road axis [rad].
    pub heading: f64,
    /// Forward speed [m/s], never negative.
    pub speed: f64,
    /// Last applied longitudinal acceleration [m/s²].
    pub accel: f64,
    /// Nearest lane centerline index.
    pub lane_index: usize,
    pub length: f64,
    pub width: f64,
    pub desired_speed: f64,
    pub role: Role,
    pub driver: DriverKind,
}

impl VehicleState {
    pub fn is_ego(&self) -> bool {
        self.role == Role::Ego
    }

    /// Bumper-to-bumper longitudinal gap to another vehicle (negative when
    /// the bodies overlap longitudinally).
    pub fn bumper_gap(&self, other: &VehicleState) -> f64 {
        (self.x - other.x).abs() - 0.5 * (self.length + other.length)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoadConfig {
    pub lane_count: usize,
    pub lane_width: f64,
    /// Longitudinal distance at which an episode ends [m].
    pub episode_length: f64,
}

impl RoadConfig {
    pub fn lane_center(&self, lane: usize) -> f64 {
        (lane as f64 + 0.5) * self.lane_width
    }

    pub fn nearest_lane(&self, y: f64) -> usize {
        let raw = (y / self.lane_width).floor();
        raw.clamp(0.0, (self.lane_count - 1) as f64) as usize
    }

    pub fn total_width(&self) -> f64 {
        self.lane_count as f64 * self.lane_width
    }

    /// Whether a vehicle center at `y` is within the paved road.
    pub fn contains_lateral(&self, y: f64) -> bool {
        (0.0..=self.total_width()).contains(&y)
    }
}

/// World initialization parameters (vehicle spread, speed ranges, geometry).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    /// Minimum initial center-to-center longitudinal distance between any
    /// two vehicles [m].
    pub min_gap: f64,
    /// Maximum initial longitudinal spread of the population [m].
    pub max_spread: f64,
    /// Desired speed of the ego vehicle [m/s].
    pub ego_desired_speed: f64,
    /// Longitudinal distance at which an episode ends [m].
    pub episode_length: f64,
    /// Desired speed range for background vehicles [m/s].
    pub desired_speed_range: [f64; 2],
    /// Initial speed range for vehicles behind the ego [m/s].
    pub rear_speed_range: [f64; 2],
    /// Initial speed range for vehicles ahead of the ego [m/s].
    pub front_speed_range: [f64; 2],
    /// Initial speed range for the ego vehicle [m/s].
    pub ego_speed_range: [f64; 2],
    /// Number of vehicles including the ego; must be odd so the median
    /// vehicle is unambiguous.
    pub vehicle_count: usize,
    pub lane_count: usize,
    /// Physics integration step [s].
    pub sim_dt: f64,
    pub lane_width: f64,
    pub vehicle_length: f64,
    pub vehicle_width: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            min_gap: 25.0,
            max_spread: 200.0,
            ego_desired_speed: 25.0,
            episode_length: 5000.0,
            desired_speed_range: [18.0, 26.0],
            rear_speed_range: [15.0, 25.0],
            front_speed_range: [10.0, 12.0],
            ego_speed_range: [10.0, 15.0],
            vehicle_count: 9,
            lane_count: 3,
            sim_dt: 0.1,
            lane_width: DEFAULT_LANE_WIDTH,
            vehicle_length: DEFAULT_VEHICLE_LENGTH,
            vehicle_width: DEFAULT_VEHICLE_WIDTH,
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("vehicle count must be odd so a median vehicle exists, got {0}")]
    EvenVehicleCount(usize),
    #[error("vehicle count must be at least 1")]
    NoVehicles,
    #[error("infeasible packing: {vehicles} vehicles at min gap {min_gap} need {required} m but max spread is {max_spread} m")]
    InfeasiblePacking { vehicles: usize, min_gap: f64, required: f64, max_spread: f64 },
    #[error("range {name} must be ordered min <= max, got [{lo}, {hi}]")]
    UnorderedRange { name: &'static str, lo: f64, hi: f64 },
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("lane count must be at least 1")]
    NoLanes,
    #[error("lane width {lane_width} must exceed vehicle width {vehicle_width}")]
    NarrowLanes { lane_width: f64, vehicle_width: f64 },
    #[error("min gap {min_gap} must be smaller than max spread {max_spread}")]
    GapExceedsSpread { min_gap: f64, max_spread: f64 },
}

impl ScenarioConfig {
    pub fn road(&self) -> RoadConfig {
        RoadConfig {
            lane_count: self.lane_count,
            lane_width: self.lane_width,
            episode_length: self.episode_length,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.vehicle_count == 0 {
            return Err(ConfigError::NoVehicles);
        }
        if self.vehicle_count % 2 == 0 {
            return Err(ConfigError::EvenVehicleCount(self.vehicle_count));
        }
        if self.lane_count == 0 {
            return Err(ConfigError::NoLanes);
        }
        for (name, value) in [
            ("min_gap", self.min_gap),
            ("max_spread", self.max_spread),
            ("episode_length", self.episode_length),
            ("sim_dt", self.sim_dt),
            ("lane_width", self.lane_width),
            ("vehicle_length", self.vehicle_length),
            ("vehicle_width", self.vehicle_width),
            ("ego_desired_speed", self.ego_desired_speed),
        ] {
            if value <= 0.0 {
                return Err(ConfigError::NonPositive { name, value });
            }
        }
        if self.lane_width <= self.vehicle_width {
            return Err(ConfigError::NarrowLanes {
                lane_width: self.lane_width,
                vehicle_width: self.vehicle_width,
            });
        }
        if self.min_gap >= self.max_spread {
            return Err(ConfigError::GapExceedsSpread { min_gap: self.min_gap, max_spread: self.max_spread });
        }
        for (name, range) in [
            ("desired_speed_range", self.desired_speed_range),
            ("rear_speed_range", self.rear_speed_range),
            ("front_speed_range", self.front_speed_range),
            ("ego_speed_range", self.ego_speed_range),
        ] {
            if range[0] > range[1] {
                return Err(ConfigError::UnorderedRange { name, lo: range[0], hi: range[1] });
            }
        }
        // (vehicle_count - 1) consecutive gaps of at least min_gap must fit
        // inside the allowed spread.
        let required = (self.vehicle_count - 1) as f64 * self.min_gap;
        if required > self.max_spread {
            return Err(ConfigError::InfeasiblePacking {
                vehicles: self.vehicle_count,
                min_gap: self.min_gap,
                required,
                max_spread: self.max_spread,
            });
        }
        Ok(())
    }
}

/// The live multi-vehicle world.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub road: RoadConfig,
    /// Sorted by initial longitudinal position; index equals vehicle id.
    pub vehicles: Vec<VehicleState>,
    pub clock: f64,
    pub sim_dt: f64,
    /// Generator for downstream stochastic draws (background drivers).
    pub rng: ChaCha8Rng,
}

impl Scenario {
    pub fn ego_index(&self) -> usize {
        self.vehicles
            .iter()
            .position(|v| v.is_ego())
            .expect("scenario invariant: exactly one ego vehicle")
    }

    pub fn ego(&self) -> &VehicleState {
        &self.vehicles[self.ego_index()]
    }

    /// Nearest vehicle ahead of `idx` in the given lane, if any.
    pub fn leader_in_lane(&self, idx: usize, lane: usize) -> Option<&VehicleState> {
        let me = &self.vehicles[idx];
        self.vehicles
            .iter()
            .enumerate()
            .filter(|(j, v)| *j != idx && v.lane_index == lane && v.x > me.x)
            .min_by(|(_, a), (_, b)| a.x.partial_cmp(&b.x).unwrap())
            .map(|(_, v)| v)
    }

    /// Nearest vehicle behind `idx` in the given lane, if any.
    pub fn follower_in_lane(&self, idx: usize, lane: usize) -> Option<&VehicleState> {
        let me = &self.vehicles[idx];
        self.vehicles
            .iter()
            .enumerate()
            .filter(|(j, v)| *j != idx && v.lane_index == lane && v.x < me.x)
            .max_by(|(_, a), (_, b)| a.x.partial_cmp(&b.x).unwrap())
            .map(|(_, v)| v)
    }

    /// Advances every vehicle by one `sim_dt` tick under the given controls.
    pub fn step(&mut self, controls: &[ControlInput], bicycle: &BicycleParams) {
        assert_eq!(controls.len(), self.vehicles.len(), "one control per vehicle");
        for (vehicle, control) in self.vehicles.iter_mut().zip(controls) {
            *vehicle = bicycle_step(vehicle, *control, bicycle, self.sim_dt);
            vehicle.lane_index = self.road.nearest_lane(vehicle.y);
        }
        self.clock += self.sim_dt;
    }
}

/// Functional form of [`Scenario::step`]: the returned world is a pure
/// function of `(s, controls)`.
pub fn step_world(s: &Scenario, controls: &[ControlInput], bicycle: &BicycleParams) -> Scenario {
    let mut next = s.clone();
    next.step(controls, bicycle);
    next
}

/// Builds the initial world: vehicles sorted by `x` with every consecutive
/// center gap at least `min_gap` and total spread at most `max_spread`; the
/// median vehicle is the ego; speeds drawn per role.
pub fn init_scenario(config: &ScenarioConfig, seed: u64) -> Result<Scenario, ConfigError> {
    config.validate()?;
    let mut rng = derive_rng(seed, stream::SCENARIO_INIT, 0);
    let m = config.vehicle_count;
    let ego_idx = (m - 1) / 2;

    // Consecutive gaps: min_gap plus an even share of the remaining slack.
    let slack = config.max_spread - (m - 1) as f64 * config.min_gap;
    let per_gap_slack = if m > 1 { slack / (m - 1) as f64 } else { 0.0 };
    let mut xs = Vec::with_capacity(m);
    let mut x = 0.0;
    for i in 0..m {
        if i > 0 {
            x += config.min_gap + rng.random_range(0.0..=1.0) * per_gap_slack;
        }
        xs.push(x);
    }

    let road = config.road();
    let mut vehicles = Vec::with_capacity(m);
    for (i, &x) in xs.iter().enumerate() {
        let lane = rng.random_range(0..config.lane_count);
        let role = if i == ego_idx { Role::Ego } else { Role::Other };
        let speed_range = if i == ego_idx {
            config.ego_speed_range
        } else if i > ego_idx {
            config.front_speed_range
        } else {
            config.rear_speed_range
        };
        let speed = sample_range(&mut rng, speed_range);
        let desired_speed = if i == ego_idx {
            config.ego_desired_speed
        } else {
            sample_range(&mut rng, config.desired_speed_range)
        };
        vehicles.push(VehicleState {
            id: i as u64,
            x,
            y: road.lane_center(lane),
            heading: 0.0,
            speed,
            accel: 0.0,
            lane_index: lane,
            length: config.vehicle_length,
            width: config.vehicle_width,
            desired_speed,
            role,
            driver: DriverKind::RuleBased,
        });
    }

    Ok(Scenario { road, vehicles, clock: 0.0, sim_dt: config.sim_dt, rng })
}

fn sample_range(rng: &mut ChaCha8Rng, range: [f64; 2]) -> f64 {
    if range[0] == range[1] {
        range[0]
    } else {
        rng.random_range(range[0]..range[1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrashKind {
    /// Bounding rectangles overlap.
    Hard,
    /// Dangerous approach: small same-lane gap or short time-to-collision.
    Soft,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrashEvent {
    pub kind: CrashKind,
    pub vehicle_a: u64,
    pub vehicle_b: u64,
    pub time: f64,
}

/// Thresholds defining a "dangerous approach" soft crash.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CollisionParams {
    /// Same-lane bumper gap below which a soft crash fires [m].
    pub soft_gap: f64,
    /// Time-to-collision below which a soft crash fires [s].
    pub soft_ttc: f64,
}

impl Default for CollisionParams {
    fn default() -> Self {
        CollisionParams { soft_gap: 2.0, soft_ttc: 1.0 }
    }
}

/// All crash events in the current world state. For each pair a hard crash
/// suppresses the soft classification.
pub fn detect_collisions(s: &Scenario, params: &CollisionParams) -> Vec<CrashEvent> {
    let mut events = Vec::new();
    let n = s.vehicles.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let a = &s.vehicles[i];
            let b = &s.vehicles[j];
            let (id_a, id_b) = if a.id <= b.id { (a.id, b.id) } else { (b.id, a.id) };
            if rectangles_overlap(a, b) {
                events.push(CrashEvent { kind: CrashKind::Hard, vehicle_a: id_a, vehicle_b: id_b, time: s.clock });
                continue;
            }
            if a.lane_index != b.lane_index {
                continue;
            }
            let gap = a.bumper_gap(b);
            let (rear, front) = if a.x <= b.x { (a, b) } else { (b, a) };
            let closing = rear.speed - front.speed;
            let ttc_hit = closing > 0.0 && gap / closing < params.soft_ttc;
            if gap < params.soft_gap || ttc_hit {
                events.push(CrashEvent { kind: CrashKind::Soft, vehicle_a: id_a, vehicle_b: id_b, time: s.clock });
            }
        }
    }
    events
}

/// Oriented-rectangle intersection via the separating axis test.
fn rectangles_overlap(a: &VehicleState, b: &VehicleState) -> bool {
    let ca = corners(a);
    let cb = corners(b);
    let axes = [
        (a.heading.cos(), a.heading.sin()),
        (-a.heading.sin(), a.heading.cos()),
        (b.heading.cos(), b.heading.sin()),
        (-b.heading.sin(), b.heading.cos()),
    ];
    for (ax, ay) in axes {
        let (min_a, max_a) = project(&ca, ax, ay);
        let (min_b, max_b) = project(&cb, ax, ay);
        if max_a < min_b || max_b < min_a {
            return false;
        }
    }
    true
}

fn corners(v: &VehicleState) -> [(f64, f64); 4] {
    let (sin, cos) = v.heading.sin_cos();
    let hl = 0.5 * v.length;
    let hw = 0.5 * v.width;
    let mut out = [(0.0, 0.0); 4];
    for (k, (dx, dy)) in [(hl, hw), (hl, -hw), (-hl, -hw), (-hl, hw)].into_iter().enumerate() {
        out[k] = (v.x + dx * cos - dy * sin, v.y + dx * sin + dy * cos);
    }
    out
}

fn project(corners: &[(f64, f64); 4], ax: f64, ay: f64) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &(x, y) in corners {
        let d = x * ax + y * ay;
        min = min.min(d);
        max = max.max(d);
    }
    (min, max)
}

pub const DUMP_HEADER: &str = "t,vehicle_id,x_m,y_m,heading_rad,speed_mps,lane_index,role";

/// Appends one CSV row per vehicle for the current world state.
pub fn write_dump_rows(w: &mut impl Write, s: &Scenario) -> std::io::Result<()> {
    for v in &s.vehicles {
        let role = match v.role {
            Role::Ego => "ego",
            Role::Other => "other",
        };
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            s.clock, v.id, v.x, v.y, v.heading, v.speed, v.lane_index, role
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_scenario(seed: u64) -> Scenario {
        init_scenario(&ScenarioConfig::default(), seed).unwrap()
    }

    #[test]
    fn table_defaults_place_nine_vehicles_within_bounds() {
        let s = default_scenario(42);
        assert_eq!(s.vehicles.len(), 9);
        assert_eq!(s.road.lane_count, 3);
        let xs: Vec<f64> = s.vehicles.iter().map(|v| v.x).collect();
        let spread = xs.last().unwrap() - xs.first().unwrap();
        assert!(spread <= 200.0 + 1e-9, "spread {spread}");
        for w in xs.windows(2) {
            assert!(w[1] - w[0] >= 25.0 - 1e-9, "gap {}", w[1] - w[0]);
        }
    }

    #[test]
    fn median_vehicle_is_ego_with_role_speeds() {
        let cfg = ScenarioConfig::default();
        for seed in 0..50 {
            let s = init_scenario(&cfg, seed).unwrap();
            let ego_idx = s.ego_index();
            assert_eq!(ego_idx, 4);
            let ego = &s.vehicles[ego_idx];
            assert!(ego.speed >= cfg.ego_speed_range[0] && ego.speed <= cfg.ego_speed_range[1]);
            assert_eq!(ego.desired_speed, cfg.ego_desired_speed);
            for v in &s.vehicles[..ego_idx] {
                assert!(v.speed >= cfg.rear_speed_range[0] && v.speed <= cfg.rear_speed_range[1]);
            }
            for v in &s.vehicles[ego_idx + 1..] {
                assert!(v.speed >= cfg.front_speed_range[0] && v.speed <= cfg.front_speed_range[1]);
            }
        }
    }

    #[test]
    fn single_vehicle_population_is_ego_only() {
        let cfg = ScenarioConfig { vehicle_count: 1, ..Default::default() };
        let s = init_scenario(&cfg, 0).unwrap();
        assert_eq!(s.vehicles.len(), 1);
        assert!(s.vehicles[0].is_ego());
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let a = default_scenario(7);
        let b = default_scenario(7);
        assert_eq!(a.vehicles, b.vehicles);
        assert_eq!(a.clock, b.clock);
    }

    #[test]
    fn even_vehicle_count_rejected() {
        let cfg = ScenarioConfig { vehicle_count: 8, ..Default::default() };
        assert!(matches!(init_scenario(&cfg, 0), Err(ConfigError::EvenVehicleCount(8))));
    }

    #[test]
    fn infeasible_packing_rejected() {
        let cfg = ScenarioConfig { vehicle_count: 11, min_gap: 25.0, max_spread: 200.0, ..Default::default() };
        assert!(matches!(init_scenario(&cfg, 0), Err(ConfigError::InfeasiblePacking { .. })));
    }

    #[test]
    fn init_invariants_hold_over_many_seeds() {
        let cfg = ScenarioConfig { vehicle_count: 5, min_gap: 10.0, max_spread: 120.0, ..Default::default() };
        for seed in 0..2000 {
            let s = init_scenario(&cfg, seed).unwrap();
            let xs: Vec<f64> = s.vehicles.iter().map(|v| v.x).collect();
            for w in xs.windows(2) {
                assert!(w[1] - w[0] >= cfg.min_gap - 1e-9);
            }
            assert!(xs.last().unwrap() - xs.first().unwrap() <= cfg.max_spread + 1e-9);
            assert_eq!(s.vehicles.iter().filter(|v| v.is_ego()).count(), 1);
        }
    }

    #[test]
    fn straight_coasting_advances_position() {
        let mut s = default_scenario(1);
        let bicycle = BicycleParams::default();
        for v in s.vehicles.iter_mut() {
            v.speed = 10.0;
        }
        let x_before: Vec<f64> = s.vehicles.iter().map(|v| v.x).collect();
        let controls = vec![ControlInput::default(); s.vehicles.len()];
        s.step(&controls, &bicycle);
        for (v, x0) in s.vehicles.iter().zip(x_before) {
            assert!((v.x - x0 - 1.0).abs() < 1e-12);
        }
        assert!((s.clock - 0.1).abs() < 1e-12);
    }

    #[test]
    fn vehicle_count_conserved_and_step_pure() {
        let s = default_scenario(3);
        let bicycle = BicycleParams::default();
        let controls: Vec<ControlInput> = s
            .vehicles
            .iter()
            .enumerate()
            .map(|(i, _)| ControlInput { accel: (i as f64 - 3.0) * 0.1, steer: 0.01 * (i as f64 - 4.0) })
            .collect();
        let mut a = s.clone();
        for _ in 0..1000 {
            a.step(&controls, &bicycle);
        }
        assert_eq!(a.vehicles.len(), s.vehicles.len());

        let once = step_world(&s, &controls, &bicycle);
        let twice = step_world(&s, &controls, &bicycle);
        assert_eq!(once.vehicles, twice.vehicles);
    }

    #[test]
    fn distant_same_lane_pair_is_quiet() {
        let mut s = default_scenario(0);
        s.vehicles.truncate(2);
        s.vehicles[0].role = Role::Ego;
        s.vehicles[1].role = Role::Other;
        for v in s.vehicles.iter_mut() {
            v.lane_index = 0;
            v.y = s.road.lane_center(0);
            v.speed = 20.0;
        }
        s.vehicles[0].x = 0.0;
        s.vehicles[1].x = 100.0;
        assert!(detect_collisions(&s, &CollisionParams::default()).is_empty());
    }

    #[test]
    fn overlap_is_one_hard_event() {
        let mut s = default_scenario(0);
        s.vehicles.truncate(2);
        for v in s.vehicles.iter_mut() {
            v.lane_index = 1;
            v.y = s.road.lane_center(1);
        }
        s.vehicles[0].x = 0.0;
        s.vehicles[1].x = 3.0; // centers 3 m apart, lengths 4.5 -> overlap
        let events = detect_collisions(&s, &CollisionParams::default());
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].kind, CrashKind::Hard);
    }

    #[test]
    fn small_gap_equal_speed_is_soft() {
        let mut s = default_scenario(0);
        s.vehicles.truncate(2);
        for v in s.vehicles.iter_mut() {
            v.lane_index = 1;
            v.y = s.road.lane_center(1);
            v.speed = 20.0;
        }
        s.vehicles[0].x = 0.0;
        s.vehicles[1].x = 6.0; // bumper gap 1.5 m
        let events = detect_collisions(&s, &CollisionParams::default());
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].kind, CrashKind::Soft);
    }

    #[test]
    fn collision_detection_symmetric_under_vehicle_swap() {
        let mut s = default_scenario(0);
        s.vehicles.truncate(2);
        for v in s.vehicles.iter_mut() {
            v.lane_index = 0;
            v.y = s.road.lane_center(0);
        }
        s.vehicles[0].x = 0.0;
        s.vehicles[0].speed = 30.0;
        s.vehicles[1].x = 20.0;
        s.vehicles[1].speed = 10.0;
        let forward = detect_collisions(&s, &CollisionParams::default());
        s.vehicles.swap(0, 1);
        let swapped = detect_collisions(&s, &CollisionParams::default());
        assert_eq!(forward.len(), swapped.len());
        for (a, b) in forward.iter().zip(&swapped) {
            assert_eq!((a.kind, a.vehicle_a, a.vehicle_b), (b.kind, b.vehicle_a, b.vehicle_b));
        }
    }
}
