//! Rule-based background traffic: IDM car following plus MOBIL lane choice,
//! executed through the two-point steering controller. Shared between the
//! simulation environment, the MOBIL baseline policy and the synthetic
//! dataset generator.

use serde::{Deserialize, Serialize};

use crate::dynamics::{BicycleParams, ControlInput, TwoPointController, TwoPointParams};
use crate::idm::{idm_acceleration, IdmParams};
use crate::mobil::{
    mobil_decide, LaneChangeContext, LaneChangeDecision, LaneNeighbors, MobilParams, Neighbor,
};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RuleTrafficParams {
    pub idm: IdmParams,
    pub mobil: MobilParams,
    pub two_point: TwoPointParams,
    pub bicycle: BicycleParams,
    /// Ticks between MOBIL evaluations once a vehicle is settled in a lane.
    pub decision_period_ticks: u32,
}

impl Default for RuleTrafficParams {
    fn default() -> Self {
        RuleTrafficParams {
            idm: IdmParams::default(),
            mobil: MobilParams::default(),
            two_point: TwoPointParams::default(),
            bicycle: BicycleParams::default(),
            decision_period_ticks: 10,
        }
    }
}

/// MOBIL view of the world from vehicle `idx`: neighbor gaps and speeds in
/// the current lane and each existing adjacent lane.
pub fn mobil_context(s: &Scenario, idx: usize) -> LaneChangeContext {
    let me = &s.vehicles[idx];
    let neighbors_in = |lane: usize| -> LaneNeighbors {
        LaneNeighbors {
            leader: s.leader_in_lane(idx, lane).map(|v| Neighbor {
                gap: me.bumper_gap(v),
                speed: v.speed,
                desired_speed: v.desired_speed,
            }),
            follower: s.follower_in_lane(idx, lane).map(|v| Neighbor {
                gap: me.bumper_gap(v),
                speed: v.speed,
                desired_speed: v.desired_speed,
            }),
        }
    };
    let lane = me.lane_index;
    LaneChangeContext {
        ego_speed: me.speed,
        ego_desired_speed: me.desired_speed,
        ego_length: me.length,
        current: neighbors_in(lane),
        left: (lane + 1 < s.road.lane_count).then(|| neighbors_in(lane + 1)),
        right: (lane > 0).then(|| neighbors_in(lane - 1)),
    }
}

/// IDM acceleration of vehicle `idx` toward its leader in `lane`.
pub fn idm_control(s: &Scenario, idx: usize, lane: usize, idm: &IdmParams) -> f64 {
    let me = &s.vehicles[idx];
    match s.leader_in_lane(idx, lane) {
        Some(leader) => {
            let gap = me.bumper_gap(leader);
            idm_acceleration(me.speed, me.desired_speed, gap.max(1e-3), me.speed - leader.speed, idm)
        }
        None => idm_acceleration(me.speed, me.desired_speed, idm.empty_lane_gap, 0.0, idm),
    }
}

/// Per-vehicle driver state for the IDM+MOBIL controller.
#[derive(Debug, Clone)]
pub struct RuleDriver {
    steering: TwoPointController,
    /// Lane centerline currently tracked.
    pub target_lane: usize,
    ticks_until_decision: u32,
}

impl RuleDriver {
    pub fn new(initial_lane: usize) -> Self {
        RuleDriver { steering: TwoPointController::new(), target_lane: initial_lane, ticks_until_decision: 0 }
    }

    pub fn is_changing(&self, s: &Scenario, idx: usize) -> bool {
        let me = &s.vehicles[idx];
        (me.y - s.road.lane_center(self.target_lane)).abs() > 0.2
    }

    /// One tick of control for vehicle `idx`. Lane decisions happen only when
    /// the vehicle is settled on its target centerline and the decision
    /// cooldown has elapsed.
    pub fn control(&mut self, s: &Scenario, idx: usize, params: &RuleTrafficParams) -> ControlInput {
        let me = &s.vehicles[idx];
        let settled = !self.is_changing(s, idx) && me.heading.abs() < 0.02;

        if self.ticks_until_decision > 0 {
            self.ticks_until_decision -= 1;
        } else if settled {
            let ctx = mobil_context(s, idx);
            match mobil_decide(&ctx, &params.idm, &params.mobil) {
                LaneChangeDecision::Left => {
                    self.target_lane += 1;
                    self.steering.reset();
                }
                LaneChangeDecision::Right => {
                    self.target_lane -= 1;
                    self.steering.reset();
                }
                LaneChangeDecision::Stay => {}
            }
            self.ticks_until_decision = params.decision_period_ticks;
        }

        let accel = idm_control(s, idx, me.lane_index, &params.idm);
        let steer = self.steering.control(
            me,
            s.road.lane_center(self.target_lane),
            &params.two_point,
            params.bicycle.max_steer,
            s.sim_dt,
        );
        ControlInput { accel, steer }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{init_scenario, ScenarioConfig};

    #[test]
    fn rule_traffic_keeps_vehicles_on_road_and_moving() {
        let cfg = ScenarioConfig::default();
        let mut s = init_scenario(&cfg, 5).unwrap();
        let params = RuleTrafficParams::default();
        let mut drivers: Vec<RuleDriver> =
            s.vehicles.iter().map(|v| RuleDriver::new(v.lane_index)).collect();
        for _ in 0..2000 {
            let controls: Vec<ControlInput> = (0..s.vehicles.len())
                .map(|i| drivers[i].control(&s, i, &params))
                .collect();
            s.step(&controls, &params.bicycle);
        }
        for v in &s.vehicles {
            assert!(s.road.contains_lateral(v.y), "vehicle {} off road at y={}", v.id, v.y);
            assert!(v.speed > 0.0);
            assert!(v.heading.abs() < 0.3);
        }
    }

    #[test]
    fn mobil_context_reports_adjacent_lanes() {
        let cfg = ScenarioConfig::default();
        let mut s = init_scenario(&cfg, 1).unwrap();
        for (i, v) in s.vehicles.iter_mut().enumerate() {
            v.lane_index = i % 3;
            v.y = s.road.lane_center(i % 3);
        }
        let ctx = mobil_context(&s, 4);
        // Lane 1 of 3 has both neighbors.
        assert!(ctx.left.is_some());
        assert!(ctx.right.is_some());
        let edge = mobil_context(&s, 2); // lane 2 = leftmost
        assert!(edge.left.is_none());
    }
}
