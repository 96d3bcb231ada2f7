//! The lane-change MDP: observation encoding, three discrete actions, the
//! crash-aware reward, and decision-step orchestration over the physics
//! simulation with either rule-based or generative background traffic.

use std::collections::VecDeque;
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{ControlInput, TwoPointController};
use crate::gan::GeneratorModel;
use crate::scenario::{
    detect_collisions, init_scenario, CollisionParams, ConfigError, CrashKind, DriverKind, Scenario,
    ScenarioConfig,
};
use crate::seeding::{derive_rng, stream};
use crate::stochastic::{overlay_lane_changes, DurationModel, LaneChangeStats, ManeuverState};
use crate::traffic::{idm_control, mobil_context, RuleDriver, RuleTrafficParams};

/// Discrete ego actions: keep lane, change one lane left, change one lane
/// right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    KeepLane,
    ChangeLeft,
    ChangeRight,
}

impl Action {
    pub const COUNT: usize = 3;

    pub fn index(self) -> usize {
        match self {
            Action::KeepLane => 0,
            Action::ChangeLeft => 1,
            Action::ChangeRight => 2,
        }
    }

    pub fn from_index(idx: usize) -> Action {
        match idx {
            0 => Action::KeepLane,
            1 => Action::ChangeLeft,
            2 => Action::ChangeRight,
            _ => panic!("action index {idx} out of range"),
        }
    }

    pub const ALL: [Action; 3] = [Action::KeepLane, Action::ChangeLeft, Action::ChangeRight];
}

/// Normalization limits for the observation vector.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObsLimits {
    /// Relative positions are normalized by this distance [m].
    pub max_relative_distance: f64,
    /// Relative speeds are normalized by this speed [m/s].
    pub max_speed: f64,
}

impl Default for ObsLimits {
    fn default() -> Self {
        ObsLimits { max_relative_distance: 200.0, max_speed: 30.0 }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RewardParams {
    /// Reference speed in the speed-reward numerator and denominator [m/s].
    pub speed_baseline: f64,
    /// Ego |acceleration| above which the speed term flips sign [m/s²].
    pub harsh_accel_threshold: f64,
    pub lane_change_penalty: f64,
    pub out_of_road_penalty: f64,
    pub hard_crash_penalty: f64,
    pub soft_crash_penalty: f64,
    pub goal_reward: f64,
}

impl Default for RewardParams {
    fn default() -> Self {
        RewardParams {
            speed_baseline: 15.0,
            harsh_accel_threshold: 1.7,
            lane_change_penalty: -1.0,
            out_of_road_penalty: -100.0,
            hard_crash_penalty: -100.0,
            soft_crash_penalty: -10.0,
            goal_reward: 100.0,
        }
    }
}

/// Itemized per-step reward; `total` is always the sum of the components.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RewardBreakdown {
    pub speed: f64,
    pub low_accel: f64,
    pub lane_change: f64,
    pub out_of_road: f64,
    pub hard_crash: f64,
    pub soft_crash: f64,
    pub goal: f64,
}

impl RewardBreakdown {
    pub fn total(&self) -> f64 {
        self.speed
            + self.low_accel
            + self.lane_change
            + self.out_of_road
            + self.hard_crash
            + self.soft_crash
            + self.goal
    }
}

/// What happened during one decision step, as input to the reward function.
#[derive(Debug, Clone, Copy, Default)]
pub struct TransitionSummary {
    pub ego_speed: f64,
    pub ego_desired_speed: f64,
    /// Ego |accel| exceeded the harsh threshold at some tick.
    pub harsh_accel: bool,
    pub lane_change_initiated: bool,
    pub out_of_road: bool,
    pub hard_crash: bool,
    pub soft_crash: bool,
    pub reached_goal: bool,
    /// No physics ran (invalid lane change off the road edge).
    pub skipped_physics: bool,
}

/// Pure reward function over a transition summary.
pub fn compute_reward(summary: &TransitionSummary, params: &RewardParams) -> RewardBreakdown {
    let mut r = RewardBreakdown::default();
    if summary.out_of_road {
        r.out_of_road = params.out_of_road_penalty;
        if summary.skipped_physics {
            return r;
        }
    }
    let denom = summary.ego_desired_speed - params.speed_baseline;
    debug_assert!(denom > 0.0, "desired speed must exceed the reward baseline");
    let speed_term = (summary.ego_speed - params.speed_baseline) / denom;
    if summary.harsh_accel {
        r.low_accel = -speed_term;
    } else {
        r.speed = speed_term;
    }
    if summary.lane_change_initiated {
        r.lane_change = params.lane_change_penalty;
    }
    if summary.hard_crash {
        r.hard_crash = params.hard_crash_penalty;
    }
    if summary.soft_crash {
        r.soft_crash = params.soft_crash_penalty;
    }
    if summary.reached_goal {
        r.goal = params.goal_reward;
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrafficMode {
    Idm,
    Gan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalKind {
    Goal,
    HardCrash,
    OutOfRoad,
    StepLimit,
}

#[derive(Debug, Clone, Copy)]
pub struct StepInfo {
    pub crash: Option<CrashKind>,
    /// Ego distance traveled since reset [m].
    pub distance: f64,
    pub episode_step: u32,
    pub terminal: Option<TerminalKind>,
    /// Hard crashes among background vehicles this step (logged only).
    pub background_hard_crashes: u32,
}

#[derive(Debug, Clone)]
pub struct StepResult {
    pub observation: Vec<f64>,
    pub reward: RewardBreakdown,
    pub done: bool,
    pub info: StepInfo,
}

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("episode already finished; call reset")]
    EpisodeFinished,
    #[error("generative traffic mode requires a trained generator")]
    MissingGenerator,
    #[error("scenario configuration invalid: {0}")]
    BadConfig(#[from] ConfigError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvConfig {
    pub scenario: ScenarioConfig,
    pub rule: RuleTrafficParams,
    pub limits: ObsLimits,
    pub reward: RewardParams,
    pub collision: CollisionParams,
    pub lane_change_stats: LaneChangeStats,
    pub lane_change_durations: DurationModel,
    /// Physics ticks per decision step.
    pub decision_period_ticks: u32,
    /// Decision-step cap per episode (terminates without bonus or penalty).
    pub step_limit: u32,
    /// Acceleration clamp for generative drivers [m/s²].
    pub gan_accel_limits: [f64; 2],
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig {
            scenario: ScenarioConfig::default(),
            rule: RuleTrafficParams::default(),
            limits: ObsLimits::default(),
            reward: RewardParams::default(),
            collision: CollisionParams::default(),
            lane_change_stats: LaneChangeStats::default(),
            lane_change_durations: DurationModel::default(),
            decision_period_ticks: 10,
            step_limit: 500,
            gan_accel_limits: [-8.0, 4.0],
        }
    }
}

impl EnvConfig {
    pub fn observation_len(&self) -> usize {
        3 + 3 * (self.scenario.vehicle_count - 1)
    }
}

enum BackgroundDriver {
    Rule(RuleDriver),
    Generative { maneuver: ManeuverState, steering: TwoPointController },
}

/// The highway MDP. One instance per logical worker; a frozen generator
/// snapshot may be shared read-only among instances.
pub struct HighwayEnv {
    pub cfg: EnvConfig,
    mode: TrafficMode,
    scenario: Scenario,
    generator: Option<Arc<GeneratorModel>>,
    background: Vec<Option<BackgroundDriver>>,
    ego_steering: TwoPointController,
    ego_target_lane: usize,
    /// Per-vehicle position history for the generator (most recent last).
    histories: Vec<VecDeque<(f64, f64)>>,
    rng: ChaCha8Rng,
    step_count: u32,
    done: bool,
    ego_start_x: f64,
}

impl HighwayEnv {
    pub fn new(cfg: EnvConfig, mode: TrafficMode, generator: Option<Arc<GeneratorModel>>) -> Result<Self, EnvError> {
        if mode == TrafficMode::Gan && generator.is_none() {
            return Err(EnvError::MissingGenerator);
        }
        cfg.scenario.validate()?;
        let scenario = init_scenario(&cfg.scenario, 0)?;
        let mut env = HighwayEnv {
            cfg,
            mode,
            scenario,
            generator,
            background: Vec::new(),
            ego_steering: TwoPointController::new(),
            ego_target_lane: 0,
            histories: Vec::new(),
            rng: derive_rng(0, stream::ENV_BACKGROUND, 0),
            step_count: 0,
            done: true,
            ego_start_x: 0.0,
        };
        env.reset(0)?;
        Ok(env)
    }

    pub fn mode(&self) -> TrafficMode {
        self.mode
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn episode_step(&self) -> u32 {
        self.step_count
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    /// Whether the ego is still traversing toward its target centerline.
    pub fn ego_mid_change(&self) -> bool {
        let ego = self.scenario.ego();
        (ego.y - self.scenario.road.lane_center(self.ego_target_lane)).abs() > 0.2
    }

    /// Starts a fresh episode and returns the first observation.
    pub fn reset(&mut self, seed: u64) -> Result<Vec<f64>, EnvError> {
        let mut scenario = init_scenario(&self.cfg.scenario, seed)?;
        let history_len = self
            .generator
            .as_ref()
            .map_or(self.cfg.scenario.vehicle_count, |g| g.cfg.observed_len.max(1));
        self.histories = scenario
            .vehicles
            .iter()
            .map(|v| {
                let mut h = VecDeque::with_capacity(history_len);
                for _ in 0..history_len {
                    h.push_back((v.x, v.y));
                }
                h
            })
            .collect();
        self.background = scenario
            .vehicles
            .iter()
            .map(|v| {
                if v.is_ego() {
                    return None;
                }
                Some(match self.mode {
                    TrafficMode::Idm => BackgroundDriver::Rule(RuleDriver::new(v.lane_index)),
                    TrafficMode::Gan => BackgroundDriver::Generative {
                        maneuver: ManeuverState::new(v.lane_index),
                        steering: TwoPointController::new(),
                    },
                })
            })
            .collect();
        for v in scenario.vehicles.iter_mut() {
            if !v.is_ego() {
                v.driver = match self.mode {
                    TrafficMode::Idm => DriverKind::RuleBased,
                    TrafficMode::Gan => DriverKind::Generative,
                };
            }
        }
        self.ego_target_lane = scenario.ego().lane_index;
        self.ego_steering.reset();
        self.rng = derive_rng(seed, stream::ENV_BACKGROUND, 1);
        self.ego_start_x = scenario.ego().x;
        self.scenario = scenario;
        self.step_count = 0;
        self.done = false;
        Ok(self.observation())
    }

    /// Observation vector of the current state (Table-style layout: ego
    /// speed ratio, lane-existence flags, then per background vehicle its
    /// normalized relative position, relative speed and lane offset code).
    pub fn observation(&self) -> Vec<f64> {
        encode_observation(&self.scenario, &self.cfg.limits)
    }

    /// One decision step: applies the lane action, advances
    /// `decision_period_ticks` physics ticks, accumulates the reward.
    pub fn step(&mut self, action: Action) -> Result<StepResult, EnvError> {
        if self.done {
            return Err(EnvError::EpisodeFinished);
        }
        let lane_count = self.scenario.road.lane_count;
        let mut summary = TransitionSummary {
            ego_desired_speed: self.scenario.ego().desired_speed,
            ..Default::default()
        };
        let mut info = StepInfo {
            crash: None,
            distance: 0.0,
            episode_step: self.step_count,
            terminal: None,
            background_hard_crashes: 0,
        };

        // Lane-change actions: ignored mid-maneuver, terminal off the edge.
        if !self.ego_mid_change() {
            match action {
                Action::KeepLane => {}
                Action::ChangeLeft => {
                    if self.ego_target_lane + 1 >= lane_count {
                        return Ok(self.finish_out_of_road(summary, info));
                    }
                    self.ego_target_lane += 1;
                    self.ego_steering.reset();
                    summary.lane_change_initiated = true;
                }
                Action::ChangeRight => {
                    if self.ego_target_lane == 0 {
                        return Ok(self.finish_out_of_road(summary, info));
                    }
                    self.ego_target_lane -= 1;
                    self.ego_steering.reset();
                    summary.lane_change_initiated = true;
                }
            }
        }

        for _ in 0..self.cfg.decision_period_ticks {
            let controls = self.tick_controls();
            let ego_idx = self.scenario.ego_index();
            if controls[ego_idx].accel.abs() > self.cfg.reward.harsh_accel_threshold {
                summary.harsh_accel = true;
            }
            self.scenario.step(&controls, &self.cfg.rule.bicycle);
            for (history, v) in self.histories.iter_mut().zip(&self.scenario.vehicles) {
                history.pop_front();
                history.push_back((v.x, v.y));
            }

            let ego = self.scenario.ego();
            let ego_id = ego.id;
            if !self.scenario.road.contains_lateral(ego.y) {
                summary.out_of_road = true;
                info.terminal = Some(TerminalKind::OutOfRoad);
                break;
            }
            let events = detect_collisions(&self.scenario, &self.cfg.collision);
            let mut hard_ego = false;
            for e in &events {
                let involves_ego = e.vehicle_a == ego_id || e.vehicle_b == ego_id;
                match e.kind {
                    CrashKind::Hard if involves_ego => hard_ego = true,
                    CrashKind::Hard => info.background_hard_crashes += 1,
                    CrashKind::Soft if involves_ego => summary.soft_crash = true,
                    CrashKind::Soft => {}
                }
            }
            if hard_ego {
                summary.hard_crash = true;
                info.terminal = Some(TerminalKind::HardCrash);
                info.crash = Some(CrashKind::Hard);
                break;
            }
            if self.scenario.ego().x >= self.scenario.road.episode_length {
                summary.reached_goal = true;
                info.terminal = Some(TerminalKind::Goal);
                break;
            }
        }

        if summary.soft_crash && info.crash.is_none() {
            info.crash = Some(CrashKind::Soft);
        }
        summary.ego_speed = self.scenario.ego().speed;
        self.step_count += 1;
        if info.terminal.is_none() && self.step_count >= self.cfg.step_limit {
            info.terminal = Some(TerminalKind::StepLimit);
        }
        self.done = info.terminal.is_some();
        info.episode_step = self.step_count;
        info.distance = self.scenario.ego().x - self.ego_start_x;

        let reward = compute_reward(&summary, &self.cfg.reward);
        Ok(StepResult { observation: self.observation(), reward, done: self.done, info })
    }

    fn finish_out_of_road(&mut self, mut summary: TransitionSummary, mut info: StepInfo) -> StepResult {
        summary.out_of_road = true;
        summary.skipped_physics = true;
        summary.ego_speed = self.scenario.ego().speed;
        self.step_count += 1;
        self.done = true;
        info.terminal = Some(TerminalKind::OutOfRoad);
        info.episode_step = self.step_count;
        info.distance = self.scenario.ego().x - self.ego_start_x;
        let reward = compute_reward(&summary, &self.cfg.reward);
        StepResult { observation: self.observation(), reward, done: true, info }
    }

    /// Per-tick control inputs for every vehicle.
    fn tick_controls(&mut self) -> Vec<ControlInput> {
        let ego_idx = self.scenario.ego_index();
        let n = self.scenario.vehicles.len();
        let mut controls = vec![ControlInput::default(); n];

        // Generative predictions for the whole scene at once.
        let gan_next: Option<Vec<(f64, f64)>> = match self.mode {
            TrafficMode::Gan => {
                let gen = self.generator.as_ref().expect("gan mode has a generator");
                let history: Vec<Vec<(f64, f64)>> =
                    self.histories.iter().map(|h| h.iter().copied().collect()).collect();
                Some(gen.generate_next_position(&history, &mut self.rng))
            }
            TrafficMode::Idm => None,
        };

        for idx in 0..n {
            if idx == ego_idx {
                let accel = idm_control(&self.scenario, idx, self.scenario.vehicles[idx].lane_index, &self.cfg.rule.idm);
                let target = self.scenario.road.lane_center(self.ego_target_lane);
                let steer = self.ego_steering.control(
                    &self.scenario.vehicles[idx],
                    target,
                    &self.cfg.rule.two_point,
                    self.cfg.rule.bicycle.max_steer,
                    self.scenario.sim_dt,
                );
                controls[idx] = ControlInput { accel, steer };
                continue;
            }
            match self.background[idx].as_mut().expect("background driver present") {
                BackgroundDriver::Rule(driver) => {
                    controls[idx] = driver.control(&self.scenario, idx, &self.cfg.rule);
                }
                BackgroundDriver::Generative { maneuver, steering } => {
                    let vehicle = &self.scenario.vehicles[idx];
                    let was_changing = maneuver.is_changing();
                    let lateral_target = overlay_lane_changes(
                        maneuver,
                        vehicle.desired_speed,
                        &self.scenario.road,
                        &self.cfg.lane_change_stats,
                        &self.cfg.lane_change_durations,
                        &mut self.rng,
                        self.scenario.sim_dt,
                    );
                    if maneuver.is_changing() != was_changing {
                        steering.reset();
                    }
                    // Longitudinal command from the generator's one-step
                    // displacement; lateral target from the overlay.
                    let predicted_x = gan_next.as_ref().expect("gan predictions")[idx].0;
                    let dt = self.scenario.sim_dt;
                    let target_speed = ((predicted_x - vehicle.x) / dt).max(0.0);
                    let accel = ((target_speed - vehicle.speed) / dt)
                        .clamp(self.cfg.gan_accel_limits[0], self.cfg.gan_accel_limits[1]);
                    let steer = steering.control(
                        vehicle,
                        lateral_target,
                        &self.cfg.rule.two_point,
                        self.cfg.rule.bicycle.max_steer,
                        dt,
                    );
                    controls[idx] = ControlInput { accel, steer };
                }
            }
        }
        controls
    }
}

/// Flat observation: `[v_ego/v_des, left-lane flag, right-lane flag]` then
/// for every background vehicle (in id order) its normalized relative
/// position, normalized relative speed and lane-offset code. Everything is
/// clamped into [-1, 1].
pub fn encode_observation(s: &Scenario, limits: &ObsLimits) -> Vec<f64> {
    let ego = s.ego();
    let mut obs = Vec::with_capacity(3 + 3 * (s.vehicles.len() - 1));
    obs.push((ego.speed / ego.desired_speed).clamp(-1.0, 1.0));
    obs.push(if ego.lane_index + 1 < s.road.lane_count { 1.0 } else { 0.0 });
    obs.push(if ego.lane_index > 0 { 1.0 } else { 0.0 });
    for v in &s.vehicles {
        if v.is_ego() {
            continue;
        }
        obs.push(((v.x - ego.x) / limits.max_relative_distance).clamp(-1.0, 1.0));
        obs.push(((v.speed - ego.speed) / limits.max_speed).clamp(-1.0, 1.0));
        let code = 0.5 * (v.lane_index as f64 - ego.lane_index as f64);
        obs.push(code.clamp(-1.0, 1.0));
    }
    obs
}

/// Rule-based ego baseline: MOBIL decides the lane action each decision
/// step (longitudinal control is already IDM inside the environment).
#[derive(Debug, Clone, Copy, Default)]
pub struct MobilEgoPolicy;

impl MobilEgoPolicy {
    pub fn act(&self, env: &HighwayEnv) -> Action {
        if env.ego_mid_change() {
            return Action::KeepLane;
        }
        let s = env.scenario();
        let ctx = mobil_context(s, s.ego_index());
        match crate::mobil::mobil_decide(&ctx, &env.cfg.rule.idm, &env.cfg.rule.mobil) {
            crate::mobil::LaneChangeDecision::Stay => Action::KeepLane,
            crate::mobil::LaneChangeDecision::Left => Action::ChangeLeft,
            crate::mobil::LaneChangeDecision::Right => Action::ChangeRight,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn idm_env() -> HighwayEnv {
        HighwayEnv::new(EnvConfig::default(), TrafficMode::Idm, None).unwrap()
    }

    #[test]
    fn observation_has_table_layout() {
        let mut env = idm_env();
        let obs = env.reset(3).unwrap();
        assert_eq!(obs.len(), 27);
        assert!(obs.iter().all(|v| (-1.0..=1.0).contains(v)));
        // Lane flags are binary.
        assert!(obs[1] == 0.0 || obs[1] == 1.0);
        assert!(obs[2] == 0.0 || obs[2] == 1.0);
    }

    #[test]
    fn speed_ratio_and_lane_codes_match_hand_values() {
        let mut env = idm_env();
        env.reset(3).unwrap();
        let ego_idx = env.scenario.ego_index();
        env.scenario.vehicles[ego_idx].speed = 12.5;
        env.scenario.vehicles[ego_idx].desired_speed = 25.0;
        // Pin lanes: ego lane 1, first other vehicle one lane right (0).
        let other_idx = if ego_idx == 0 { 1 } else { 0 };
        env.scenario.vehicles[ego_idx].lane_index = 1;
        env.scenario.vehicles[other_idx].lane_index = 0;
        let obs = env.observation();
        assert_eq!(obs[0], 0.5);
        let other_offset = 3 + 3 * if other_idx < ego_idx { other_idx } else { other_idx - 1 };
        assert_eq!(obs[other_offset + 2], -0.5);
    }

    #[test]
    fn leftmost_lane_flags() {
        let mut env = idm_env();
        env.reset(3).unwrap();
        let ego_idx = env.scenario.ego_index();
        env.scenario.vehicles[ego_idx].lane_index = env.scenario.road.lane_count - 1;
        let obs = env.observation();
        assert_eq!(obs[1], 0.0, "no lane further left");
        assert_eq!(obs[2], 1.0, "lane to the right exists");
    }

    #[test]
    fn invalid_left_change_terminates_at_minus_hundred() {
        let mut env = idm_env();
        env.reset(7).unwrap();
        let ego_idx = env.scenario.ego_index();
        let top = env.scenario.road.lane_count - 1;
        env.scenario.vehicles[ego_idx].lane_index = top;
        env.scenario.vehicles[ego_idx].y = env.scenario.road.lane_center(top);
        env.ego_target_lane = top;
        let result = env.step(Action::ChangeLeft).unwrap();
        assert!(result.done);
        assert_eq!(result.reward.total(), -100.0);
        assert_eq!(result.info.terminal, Some(TerminalKind::OutOfRoad));
        assert!(env.step(Action::KeepLane).is_err());
    }

    #[test]
    fn goal_reached_pays_plus_hundred() {
        let mut env = idm_env();
        env.reset(7).unwrap();
        let ego_idx = env.scenario.ego_index();
        env.scenario.vehicles[ego_idx].x = env.scenario.road.episode_length - 1.0;
        let result = env.step(Action::KeepLane).unwrap();
        assert!(result.done);
        assert_eq!(result.info.terminal, Some(TerminalKind::Goal));
        assert_eq!(result.reward.goal, 100.0);
        assert!(result.reward.total() >= 100.0 - 1.5);
    }

    #[test]
    fn reward_components_always_sum_to_total() {
        let mut env = idm_env();
        let mut rng = derive_rng(99, stream::EVAL_EPISODE, 0);
        let mut episode = 0u64;
        env.reset(episode).unwrap();
        for _ in 0..1000 {
            let action = Action::from_index(rng.random_range(0..3));
            let result = env.step(action).unwrap();
            let r = &result.reward;
            let sum = r.speed + r.low_accel + r.lane_change + r.out_of_road + r.hard_crash + r.soft_crash + r.goal;
            assert_eq!(sum, r.total());
            if result.done {
                episode += 1;
                env.reset(episode).unwrap();
            }
        }
    }

    #[test]
    fn speed_reward_is_one_at_desired_speed() {
        let params = RewardParams::default();
        let summary = TransitionSummary {
            ego_speed: 25.0,
            ego_desired_speed: 25.0,
            ..Default::default()
        };
        let r = compute_reward(&summary, &params);
        assert_eq!(r.total(), 1.0);
        // At the baseline speed the term vanishes.
        let at_baseline = TransitionSummary { ego_speed: 15.0, ego_desired_speed: 25.0, ..Default::default() };
        assert_eq!(compute_reward(&at_baseline, &params).total(), 0.0);
    }

    #[test]
    fn lane_change_at_desired_speed_nets_zero() {
        let params = RewardParams::default();
        let summary = TransitionSummary {
            ego_speed: 25.0,
            ego_desired_speed: 25.0,
            lane_change_initiated: true,
            ..Default::default()
        };
        let r = compute_reward(&summary, &params);
        assert_eq!(r.total(), 0.0);
        assert_eq!(r.lane_change, -1.0);
    }

    #[test]
    fn harsh_braking_flips_speed_term() {
        let params = RewardParams::default();
        let summary = TransitionSummary {
            ego_speed: 20.0,
            ego_desired_speed: 25.0,
            harsh_accel: true,
            ..Default::default()
        };
        let r = compute_reward(&summary, &params);
        assert_eq!(r.speed, 0.0);
        assert_eq!(r.low_accel, -0.5);
    }

    #[test]
    fn idm_mode_trace_is_reproducible() {
        let script: Vec<Action> = (0..40)
            .map(|k| match k % 7 {
                0 => Action::ChangeLeft,
                3 => Action::ChangeRight,
                _ => Action::KeepLane,
            })
            .collect();
        let run = || {
            let mut env = idm_env();
            let mut trace = vec![format!("{:?}", env.reset(11).unwrap())];
            for &a in &script {
                if env.is_done() {
                    break;
                }
                let r = env.step(a).unwrap();
                trace.push(format!("{:?} {:?}", r.observation, r.reward));
            }
            trace
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn mid_change_actions_are_ignored() {
        let mut env = idm_env();
        env.reset(13).unwrap();
        let before = env.ego_target_lane;
        let valid_dir = if before + 1 < env.scenario.road.lane_count {
            Action::ChangeLeft
        } else {
            Action::ChangeRight
        };
        let r = env.step(valid_dir).unwrap();
        assert_eq!(r.reward.lane_change, -1.0);
        if env.ego_mid_change() && !env.is_done() {
            let target_now = env.ego_target_lane;
            let r2 = env.step(valid_dir).unwrap();
            assert_eq!(env.ego_target_lane, target_now, "no retarget mid-change");
            assert_eq!(r2.reward.lane_change, 0.0, "no penalty for ignored action");
        }
    }
}
