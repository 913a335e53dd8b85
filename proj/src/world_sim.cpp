// Copyright 2026 The Pretouch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pretouch/world_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pretouch/error.hpp"

namespace pretouch {

namespace {

struct Resolution {
  bool ok = false;
  Vec2 object;
};

// Pushes the object out of both fingertip domes by alternating projections.
// Fails when the domes squeeze the object and no overlap-free position exists.
Resolution resolve_contacts(Vec2 object, const std::array<Vec2, kNumFingers>& tips, double reach,
                            double floor_y, const SimParams& sim) {
  for (int it = 0; it < sim.projection_iterations; ++it) {
    double worst = 0.0;
    for (const Vec2& tip : tips) {
      const Vec2 d = object - tip;
      const double dist = d.norm();
      const double overlap = reach - dist;
      if (overlap <= 0.0) continue;
      const Vec2 normal = dist > 0.0 ? d * (1.0 / dist) : Vec2{0.0, 1.0};
      object += normal * overlap;
      worst = std::max(worst, overlap);
    }
    if (object.y < floor_y) {
      worst = std::max(worst, floor_y - object.y);
      object.y = floor_y;
    }
    if (worst <= sim.projection_tolerance) return {true, object};
  }
  double residual = floor_y - object.y;
  for (const Vec2& tip : tips) residual = std::max(residual, reach - distance(object, tip));
  return {residual <= sim.penetration_tolerance, object};
}

}  // namespace

std::string BrakeConfig::label() const {
  return "L" + std::to_string(left_free + 1) + "R" + std::to_string(right_free + 1);
}

void validate(const WorldParams& params) {
  validate(params.hand);
  const auto& sim = params.sim;
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfigError, "world: " + what); };
  if (!(params.object.radius > 0.0)) fail("object radius must be positive");
  if (!(sim.dt > 0.0)) fail("dt must be positive");
  if (!(sim.joint_rate_limit > 0.0)) fail("joint_rate_limit must be positive");
  if (!(sim.substep_angle > 0.0)) fail("substep_angle must be positive");
  if (sim.projection_iterations < 1) fail("projection_iterations must be >= 1");
  if (!(sim.penetration_tolerance >= sim.projection_tolerance)) {
    fail("penetration_tolerance must be >= projection_tolerance");
  }
  if (!within_limits(sim.preset_flexion, params.hand)) fail("preset_flexion outside joint limits");
}

WorldState step(const WorldState& state, const HybridAction& action, double dt, const WorldParams& params) {
  const HandParams& hand = params.hand;
  const SimParams& sim = params.sim;
  for (double cmd : action.motor_commands) {
    if (!std::isfinite(cmd) || cmd < hand.joint_limit_low || cmd > hand.joint_limit_high) {
      throw Error(ErrorCode::kRejectedAction, "motor command out of joint range");
    }
  }

  const double max_move = sim.joint_rate_limit * dt;
  const HandPose pose = forward_kinematics(state.joints, hand);
  const double reach = params.object.radius + hand.surface_radius();
  const double floor_y = sim.palm_enabled ? sim.palm_height + params.object.radius
                                          : -std::numeric_limits<double>::infinity();

  std::array<double, kNumFingers> delta{};
  std::array<Vec2, kNumFingers> pivot{};
  std::array<Vec2, kNumFingers> arm{};
  double largest = 0.0;
  for (int f = 0; f < kNumFingers; ++f) {
    const int k = action.brakes.free_joint(f);
    const double current = state.joints.at(f, k);
    delta[f] = std::clamp(action.motor_commands[f] - current, -max_move, max_move);
    pivot[f] = pose.fingers[f].points[k];
    arm[f] = pose.fingers[f].arc_center - pivot[f];
    largest = std::max(largest, std::abs(delta[f]));
  }

  auto tip_at = [&](int f, double applied) { return pivot[f] + rotate(arm[f], kFlexSign[f] * applied); };

  std::array<double, kNumFingers> applied{};
  std::array<bool, kNumFingers> moving = {delta[0] != 0.0, delta[1] != 0.0};
  Vec2 object = state.object_position;
  const int substeps = std::max(1, static_cast<int>(std::ceil(largest / sim.substep_angle)));

  for (int i = 1; i <= substeps && (moving[0] || moving[1]); ++i) {
    const double frac = static_cast<double>(i) / substeps;
    std::array<double, kNumFingers> trial = applied;
    for (int f = 0; f < kNumFingers; ++f) {
      if (moving[f]) trial[f] = frac * delta[f];
    }
    Resolution r = resolve_contacts(object, {tip_at(0, trial[0]), tip_at(1, trial[1])}, reach, floor_y, sim);
    if (r.ok) {
      applied = trial;
      object = r.object;
      continue;
    }
    // Jammed: let one finger continue if it can, the other stops at contact.
    bool advanced = false;
    for (int f = 0; f < kNumFingers && !advanced; ++f) {
      if (!moving[f] || !moving[1 - f]) continue;
      std::array<double, kNumFingers> single = applied;
      single[f] = trial[f];
      Resolution rs = resolve_contacts(object, {tip_at(0, single[0]), tip_at(1, single[1])}, reach, floor_y, sim);
      if (rs.ok) {
        applied = single;
        object = rs.object;
        moving[1 - f] = false;
        advanced = true;
      }
    }
    if (!advanced) moving = {false, false};
  }

  WorldState next = state;
  for (int f = 0; f < kNumFingers; ++f) {
    const int k = action.brakes.free_joint(f);
    next.joints.at(f, k) = std::clamp(state.joints.at(f, k) + applied[f], hand.joint_limit_low,
                                      hand.joint_limit_high);
  }
  for (int j = 0; j < kNumJoints; ++j) {
    next.joint_velocities[j] = (next.joints.angles[j] - state.joints.angles[j]) / dt;
  }
  next.object_position = object;
  next.object_velocity = (object - state.object_position) * (1.0 / dt);
  return next;
}

std::array<double, kNumFingers> contact_gaps(const JointVector& joints, const Vec2& object,
                                             const WorldParams& params) {
  const auto tips = fingertip_centers(joints, params.hand);
  const double reach = params.object.radius + params.hand.surface_radius();
  return {distance(object, tips[0]) - reach, distance(object, tips[1]) - reach};
}

std::array<bool, kNumFingers> detect_contacts(const WorldState& state, const WorldParams& params) {
  const auto gaps = contact_gaps(state.joints, state.object_position, params);
  return {gaps[0] <= params.sim.contact_tolerance, gaps[1] <= params.sim.contact_tolerance};
}

int missing_contacts(const WorldState& state, const WorldParams& params) {
  const auto c = detect_contacts(state, params);
  return static_cast<int>(!c[0]) + static_cast<int>(!c[1]);
}

double penetration_depth(const WorldState& state, const WorldParams& params) {
  const auto gaps = contact_gaps(state.joints, state.object_position, params);
  return std::max(0.0, -std::min(gaps[0], gaps[1]));
}

WorldState preset_contact_pose(const WorldParams& params) {
  WorldState state;
  state.object_position = params.object.start_position;
  const JointVector& closed = params.sim.preset_flexion;

  for (int f = 0; f < kNumFingers; ++f) {
    auto gap_at = [&](double s) {
      JointVector q = state.joints;
      q.at(f, 0) = s * closed.at(f, 0);
      for (int j = 1; j < kJointsPerFinger; ++j) q.at(f, j) = closed.at(f, j);
      return contact_gaps(q, state.object_position, params)[f];
    };
    if (gap_at(0.0) <= 0.0) {
      throw Error(ErrorCode::kUnreachable, "fingertip overlaps the object with the proximal joint open");
    }
    constexpr int kScan = 400;
    double lo = 0.0;
    double hi = -1.0;
    for (int i = 1; i <= kScan; ++i) {
      const double s = static_cast<double>(i) / kScan;
      if (gap_at(s) <= 0.0) {
        hi = s;
        break;
      }
      lo = s;
    }
    if (hi < 0.0) throw Error(ErrorCode::kUnreachable, "preset flexion never reaches the object");
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (gap_at(mid) > 0.0 ? lo : hi) = mid;
    }
    state.joints.at(f, 0) = lo * closed.at(f, 0);
    for (int j = 1; j < kJointsPerFinger; ++j) state.joints.at(f, j) = closed.at(f, j);
  }
  const auto contacts = detect_contacts(state, params);
  if (!contacts[0] || !contacts[1]) {
    throw Error(ErrorCode::kUnreachable, "preset pose does not touch the object with both fingertips");
  }
  return state;
}

double horizontal_goal_distance(const Vec2& object, const ObjectParams& params) {
  return std::abs(object.x - params.goal_position.x);
}

}  // namespace pretouch
