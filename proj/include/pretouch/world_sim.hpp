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

#pragma once

#include <array>
#include <numbers>
#include <string>

#include "pretouch/hand_model.hpp"
#include "pretouch/vec2.hpp"

namespace pretouch {

// Exactly one unbraked joint per finger. Indices are 0-based internally and
// printed 1-based.
struct BrakeConfig {
  static constexpr int kCount = kJointsPerFinger * kJointsPerFinger;

  int left_free = 0;
  int right_free = 0;

  [[nodiscard]] constexpr int free_joint(int finger) const { return finger == 0 ? left_free : right_free; }
  [[nodiscard]] constexpr int index() const { return left_free * kJointsPerFinger + right_free; }
  [[nodiscard]] static constexpr BrakeConfig from_index(int i) {
    return {i / kJointsPerFinger, i % kJointsPerFinger};
  }
  [[nodiscard]] constexpr bool is_braked(int finger, int joint) const { return free_joint(finger) != joint; }
  [[nodiscard]] std::string label() const;

  friend constexpr bool operator==(const BrakeConfig&, const BrakeConfig&) = default;
};

struct HybridAction {
  // Target angle for each finger's unbraked joint.
  std::array<double, kNumFingers> motor_commands{};
  BrakeConfig brakes;
};

struct ObjectParams {
  double radius = 40.0;
  Vec2 start_position{-45.0, 45.0};
  Vec2 goal_position{45.0, 45.0};
};

struct SimParams {
  double dt = 0.2;
  double joint_rate_limit = 1.5;
  // Fingertip counts as touching when the surface gap is at most this (mm).
  double contact_tolerance = 0.5;
  // Largest overlap accepted after a completed step (mm).
  double penetration_tolerance = 0.1;
  int projection_iterations = 32;
  double projection_tolerance = 1e-3;
  // Largest joint rotation per collision substep (rad).
  double substep_angle = 0.01;
  // The palm is the line y = palm_height; the cylinder cannot pass below it.
  bool palm_enabled = true;
  double palm_height = 5.0;
  // Closed end of the preset grasp motion.
  JointVector preset_flexion{{std::numbers::pi / 2.0, std::numbers::pi / 2.0, std::numbers::pi / 2.0, std::numbers::pi / 2.0,
                             std::numbers::pi / 2.0, 0.6981}};
};

struct WorldParams {
  HandParams hand;
  ObjectParams object;
  SimParams sim;
};

void validate(const WorldParams& params);

struct WorldState {
  JointVector joints;
  std::array<double, kNumJoints> joint_velocities{};
  Vec2 object_position;
  Vec2 object_velocity;

  friend bool operator==(const WorldState&, const WorldState&) = default;
};

// Advances the hand-object system by `dt` seconds. Braked joints are held,
// each unbraked joint moves towards its command at a bounded rate, and the
// cylinder is pushed out of the fingertips along the contact normals.
// Throws Error(kRejectedAction) for out-of-range motor commands.
[[nodiscard]] WorldState step(const WorldState& state, const HybridAction& action, double dt,
                              const WorldParams& params);

[[nodiscard]] inline WorldState step(const WorldState& state, const HybridAction& action,
                                     const WorldParams& params) {
  return step(state, action, params.sim.dt, params);
}

// Gap between each fingertip dome and the cylinder surface (mm).
[[nodiscard]] std::array<double, kNumFingers> contact_gaps(const JointVector& joints, const Vec2& object,
                                                           const WorldParams& params);

[[nodiscard]] std::array<bool, kNumFingers> detect_contacts(const WorldState& state,
                                                            const WorldParams& params);

// Number of fingertips not touching the object.
[[nodiscard]] int missing_contacts(const WorldState& state, const WorldParams& params);

// Largest fingertip-cylinder overlap (mm); zero when separated.
[[nodiscard]] double penetration_depth(const WorldState& state, const WorldParams& params);

// Object at its start position, both fingertips just touching it. Distal
// joints take their SimParams::preset_flexion values and the proximal joint
// is found by bisection between zero and its preset value. Throws
// Error(kUnreachable).
[[nodiscard]] WorldState preset_contact_pose(const WorldParams& params);

[[nodiscard]] double horizontal_goal_distance(const Vec2& object, const ObjectParams& params);

}  // namespace pretouch
