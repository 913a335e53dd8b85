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

#include "pretouch/hand_model.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "pretouch/error.hpp"

namespace pretouch {

void validate(const HandParams& params) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfigError, "hand: " + what); };
  for (const auto& finger : params.link_lengths) {
    for (double len : finger) {
      if (!(len > 0.0)) fail("link lengths must be strictly positive");
    }
  }
  if (params.sensor_count_per_tip != kSensorsPerTip) fail("sensor_count_per_tip must be 4");
  if (!(params.fingertip_arc_radius > 0.0)) fail("fingertip_arc_radius must be positive");
  if (!(params.surface_offset > 0.0)) fail("surface_offset must be positive");
  if (!(params.sensor_range_min > 0.0 && params.sensor_range_min < params.sensor_range_max)) {
    fail("sensor range must satisfy 0 < min < max");
  }
  if (!(params.joint_limit_low < params.joint_limit_high)) fail("joint limits are inverted");
}

JointVector mirrored(const JointVector& joints) {
  JointVector out;
  for (int j = 0; j < kJointsPerFinger; ++j) {
    out.at(0, j) = joints.at(1, j);
    out.at(1, j) = joints.at(0, j);
  }
  return out;
}

JointVector clamp_to_limits(const JointVector& joints, const HandParams& params) {
  JointVector out = joints;
  for (double& a : out.angles) a = std::clamp(a, params.joint_limit_low, params.joint_limit_high);
  return out;
}

bool within_limits(const JointVector& joints, const HandParams& params) {
  return std::all_of(joints.angles.begin(), joints.angles.end(), [&](double a) {
    return a >= params.joint_limit_low && a <= params.joint_limit_high;
  });
}

HandPose forward_kinematics(const JointVector& joints, const HandParams& params) {
  HandPose pose;
  for (int f = 0; f < kNumFingers; ++f) {
    FingerPose& finger = pose.fingers[f];
    Vec2 p = params.base_positions[f];
    double heading = params.base_orientations[f];
    finger.points[0] = p;
    for (int j = 0; j < kJointsPerFinger; ++j) {
      heading += kFlexSign[f] * joints.at(f, j);
      p += params.link_lengths[f][j] * unit_at(heading);
      finger.points[j + 1] = p;
    }
    finger.arc_center = p;
    finger.heading = heading;
  }
  return pose;
}

std::array<Vec2, kNumFingers> fingertip_centers(const JointVector& joints, const HandParams& params) {
  std::array<Vec2, kNumFingers> centers;
  for (int f = 0; f < kNumFingers; ++f) {
    Vec2 p = params.base_positions[f];
    double heading = params.base_orientations[f];
    for (int j = 0; j < kJointsPerFinger; ++j) {
      heading += kFlexSign[f] * joints.at(f, j);
      p += params.link_lengths[f][j] * unit_at(heading);
    }
    centers[f] = p;
  }
  return centers;
}

SensorFrames sensor_frames(const HandPose& pose, const HandParams& params) {
  SensorFrames frames;
  const double first = -0.5 * (kSensorsPerTip - 1) * params.sensor_angular_spacing;
  for (int f = 0; f < kNumFingers; ++f) {
    const FingerPose& finger = pose.fingers[f];
    for (int k = 0; k < kSensorsPerTip; ++k) {
      const Vec2 dir = unit_at(finger.heading + first + k * params.sensor_angular_spacing);
      frames[f * kSensorsPerTip + k] = {finger.arc_center + params.fingertip_arc_radius * dir, dir};
    }
  }
  return frames;
}

SensorFrames sensor_frames(const JointVector& joints, const HandParams& params) {
  return sensor_frames(forward_kinematics(joints, params), params);
}

double fingertip_surface_distance(const Vec2& point, const JointVector& joints,
                                  const HandParams& params) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec2& c : fingertip_centers(joints, params)) {
    best = std::min(best, distance(point, c) - params.surface_radius());
  }
  return best;
}

}  // namespace pretouch
