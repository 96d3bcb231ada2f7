//! Generalized MOBIL lane-change criterion with separate politeness factors
//! for the prospective follower in the target lane and the abandoned
//! follower in the current lane.

use serde::{Deserialize, Serialize};

use crate::idm::{idm_acceleration, IdmParams};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MobilParams {
    /// Acceleration-gain threshold a change must clear [m/s²].
    pub changing_threshold: f64,
    /// Politeness weight on the abandoned rear vehicle (the follower in the
    /// ego's current lane).
    pub politeness_rear: f64,
    /// Politeness weight on the side-lane vehicle (the prospective new
    /// follower in the target lane).
    pub politeness_side: f64,
    /// Maximum deceleration the change may impose on the new follower [m/s²].
    pub max_safe_decel: f64,
}

impl Default for MobilParams {
    fn default() -> Self {
        MobilParams {
            changing_threshold: 0.1,
            politeness_rear: 0.5,
            politeness_side: 1.0,
            max_safe_decel: 4.0,
        }
    }
}

/// A neighbor as seen from the ego's (projected) position in some lane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    /// Bumper gap between the ego and this vehicle [m].
    pub gap: f64,
    pub speed: f64,
    pub desired_speed: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LaneNeighbors {
    pub leader: Option<Neighbor>,
    pub follower: Option<Neighbor>,
}

/// Everything MOBIL needs to evaluate a change: the ego state plus neighbor
/// gaps/speeds in the current lane and in each existing adjacent lane.
#[derive(Debug, Clone, PartialEq)]
pub struct LaneChangeContext {
    pub ego_speed: f64,
    pub ego_desired_speed: f64,
    pub ego_length: f64,
    pub current: LaneNeighbors,
    /// `None` when no lane exists to the left.
    pub left: Option<LaneNeighbors>,
    /// `None` when no lane exists to the right.
    pub right: Option<LaneNeighbors>,
}

impl LaneChangeContext {
    /// Mirror image: left and right swapped. Useful for symmetry checks.
    pub fn mirrored(&self) -> Self {
        LaneChangeContext {
            left: self.right,
            right: self.left,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaneChangeDecision {
    Stay,
    Left,
    Right,
}

fn accel_towards(me_speed: f64, me_desired: f64, leader: Option<&Neighbor>, gap: f64, idm: &IdmParams) -> f64 {
    match leader {
        Some(l) => idm_acceleration(me_speed, me_desired, gap, me_speed - l.speed, idm),
        None => idm_acceleration(me_speed, me_desired, idm.empty_lane_gap, 0.0, idm),
    }
}

/// Incentive and safety evaluation of one candidate lane. Returns the
/// incentive when the lane passes the safety criterion.
fn evaluate_candidate(
    ctx: &LaneChangeContext,
    candidate: &LaneNeighbors,
    idm: &IdmParams,
    mobil: &MobilParams,
) -> Option<f64> {
    // Ego acceleration before and after the hypothetical change.
    let ego_before = match &ctx.current.leader {
        Some(l) => idm_acceleration(ctx.ego_speed, ctx.ego_desired_speed, l.gap, ctx.ego_speed - l.speed, idm),
        None => idm_acceleration(ctx.ego_speed, ctx.ego_desired_speed, idm.empty_lane_gap, 0.0, idm),
    };
    let ego_after = match &candidate.leader {
        Some(l) => idm_acceleration(ctx.ego_speed, ctx.ego_desired_speed, l.gap, ctx.ego_speed - l.speed, idm),
        None => idm_acceleration(ctx.ego_speed, ctx.ego_desired_speed, idm.empty_lane_gap, 0.0, idm),
    };

    // New follower: its leader was the candidate-lane leader, becomes the ego.
    let mut new_follower_delta = 0.0;
    if let Some(f) = &candidate.follower {
        let gap_before = match &candidate.leader {
            Some(l) => f.gap + l.gap + ctx.ego_length,
            None => idm.empty_lane_gap,
        };
        let before = accel_towards(f.speed, f.desired_speed, candidate.leader.as_ref(), gap_before, idm);
        let after = idm_acceleration(f.speed, f.desired_speed, f.gap, f.speed - ctx.ego_speed, idm);
        // Safety criterion: the change must not force the new follower to
        // brake harder than the safe deceleration.
        if after < -mobil.max_safe_decel {
            return None;
        }
        new_follower_delta = after - before;
    }

    // Old follower: its leader was the ego, becomes the ego's old leader.
    let mut old_follower_delta = 0.0;
    if let Some(f) = &ctx.current.follower {
        let before = idm_acceleration(f.speed, f.desired_speed, f.gap, f.speed - ctx.ego_speed, idm);
        let gap_after = match &ctx.current.leader {
            Some(l) => f.gap + l.gap + ctx.ego_length,
            None => idm.empty_lane_gap,
        };
        let after = accel_towards(f.speed, f.desired_speed, ctx.current.leader.as_ref(), gap_after, idm);
        old_follower_delta = after - before;
    }

    let incentive = (ego_after - ego_before)
        + mobil.politeness_side * new_follower_delta
        + mobil.politeness_rear * old_follower_delta;
    Some(incentive)
}

/// MOBIL decision: among candidate lanes passing the follower-safety
/// criterion, pick the one whose weighted acceleration gain exceeds the
/// changing threshold. Equal qualifying incentives break toward the left.
pub fn mobil_decide(ctx: &LaneChangeContext, idm: &IdmParams, mobil: &MobilParams) -> LaneChangeDecision {
    let left = ctx.left.as_ref().and_then(|lane| evaluate_candidate(ctx, lane, idm, mobil));
    let right = ctx.right.as_ref().and_then(|lane| evaluate_candidate(ctx, lane, idm, mobil));

    let left_ok = left.filter(|&g| g > mobil.changing_threshold);
    let right_ok = right.filter(|&g| g > mobil.changing_threshold);

    match (left_ok, right_ok) {
        (None, None) => LaneChangeDecision::Stay,
        (Some(_), None) => LaneChangeDecision::Left,
        (None, Some(_)) => LaneChangeDecision::Right,
        (Some(l), Some(r)) => {
            if r > l {
                LaneChangeDecision::Right
            } else {
                LaneChangeDecision::Left
            }
        }
    }
}
