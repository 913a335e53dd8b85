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
#include <cstddef>
#include <numbers>

#include "pretouch/vec2.hpp"

namespace pretouch {

inline constexpr int kNumFingers = 2;
inline constexpr int kJointsPerFinger = 3;
inline constexpr int kNumJoints = kNumFingers * kJointsPerFinger;
inline constexpr int kSensorsPerTip = 4;
inline constexpr int kNumBeams = kNumFingers * kSensorsPerTip;

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

// Finger 0 (left) curls clockwise towards the bisecting plane, finger 1 (right)
// counter-clockwise, so equal joint vectors give mirror-image fingers.
inline constexpr std::array<double, kNumFingers> kFlexSign = {-1.0, 1.0};

// Geometry of the two-fingered planar hand. Lengths in mm, angles in rad.
// Base orientations are math angles (counter-clockwise from +x) of the first
// link at zero flexion.
struct HandParams {
  std::array<std::array<double, kJointsPerFinger>, kNumFingers> link_lengths = {
      std::array<double, kJointsPerFinger>{60.0, 60.0, 40.0}, std::array<double, kJointsPerFinger>{60.0, 60.0, 40.0}};
  std::array<Vec2, kNumFingers> base_positions = {Vec2{-80.0, 0.0}, Vec2{80.0, 0.0}};
  std::array<double, kNumFingers> base_orientations = {deg_to_rad(180.0), deg_to_rad(0.0)};
  double fingertip_arc_radius = 15.0;
  int sensor_count_per_tip = kSensorsPerTip;
  double sensor_angular_spacing = deg_to_rad(25.0);
  double sensor_range_min = 10.0;
  double sensor_range_max = 255.0;
  // Sensor-to-contact-surface distance along each beam.
  double surface_offset = 15.0;
  double joint_limit_low = 0.0;
  double joint_limit_high = std::numbers::pi / 2.0;

  // Radius of the rigid fingertip dome about the sensor-arc center.
  [[nodiscard]] double surface_radius() const { return surface_offset; }
};

// Throws Error(kConfigError) when the geometry breaks a structural invariant.
void validate(const HandParams& params);

// Six joint angles: left finger joints 1-3, then right finger joints 1-3.
struct JointVector {
  std::array<double, kNumJoints> angles{};

  [[nodiscard]] double& at(int finger, int joint) { return angles[finger * kJointsPerFinger + joint]; }
  [[nodiscard]] double at(int finger, int joint) const {
    return angles[finger * kJointsPerFinger + joint];
  }

  friend bool operator==(const JointVector&, const JointVector&) = default;
};

// Swaps the finger blocks; the mirrored hand is the reflection across x = 0.
[[nodiscard]] JointVector mirrored(const JointVector& joints);

[[nodiscard]] JointVector clamp_to_limits(const JointVector& joints, const HandParams& params);

[[nodiscard]] bool within_limits(const JointVector& joints, const HandParams& params);

struct SensorFrame {
  Vec2 origin;
  Vec2 direction;
};

struct FingerPose {
  // Proximal joint followed by the end of each link.
  std::array<Vec2, kJointsPerFinger + 1> points{};
  // Sensor-arc center (end of the distal link) and its heading (math angle).
  Vec2 arc_center;
  double heading = 0.0;
};

struct HandPose {
  std::array<FingerPose, kNumFingers> fingers{};
};

[[nodiscard]] HandPose forward_kinematics(const JointVector& joints, const HandParams& params);

// Arc centers only; the hot path of the contact simulation.
[[nodiscard]] std::array<Vec2, kNumFingers> fingertip_centers(const JointVector& joints,
                                                              const HandParams& params);

using SensorFrames = std::array<SensorFrame, kNumBeams>;

// Beam j of finger f is at index f * 4 + j. Within a fingertip the sensors are
// ordered counter-clockwise, symmetric about the heading.
[[nodiscard]] SensorFrames sensor_frames(const JointVector& joints, const HandParams& params);

[[nodiscard]] SensorFrames sensor_frames(const HandPose& pose, const HandParams& params);

// Signed distance from `point` to the nearest fingertip dome: negative inside.
[[nodiscard]] double fingertip_surface_distance(const Vec2& point, const JointVector& joints,
                                                const HandParams& params);

}  // namespace pretouch
