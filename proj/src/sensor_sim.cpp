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

#include "pretouch/sensor_sim.hpp"

#include <algorithm>
#include <cmath>

namespace pretouch {

std::string_view to_string(SensingMode mode) {
  return mode == SensingMode::kTactile ? "tactile" : "proximity";
}

double raycast_cylinder(const SensorFrame& frame, const Vec2& center, double radius,
                        const SensorRange& range) {
  // |o + t d - c|^2 = r^2 with |d| = 1  =>  t^2 + 2 b t + c = 0
  const Vec2 oc = frame.origin - center;
  const double b = dot(frame.direction, oc);
  const double c = oc.squared_norm() - radius * radius;
  if (c <= 0.0) return range.min;
  const double disc = b * b - c;
  if (disc < 0.0) return range.max;
  const double t = -b - std::sqrt(disc);
  if (t < 0.0) return range.max;
  return std::clamp(t, range.min, range.max);
}

MeasurementVector expected_measurements(const SensorFrames& frames, const Vec2& object, double radius,
                                        const SensorRange& range) {
  MeasurementVector z;
  for (int j = 0; j < kNumBeams; ++j) z[j] = raycast_cylinder(frames[j], object, radius, range);
  return z;
}

MeasurementVector expected_measurements(const JointVector& joints, const Vec2& object, double radius,
                                        const HandParams& hand) {
  return expected_measurements(sensor_frames(joints, hand), object, radius, sensor_range(hand));
}

MeasurementVector tactile_truncate(const MeasurementVector& z, double d_tact_max) {
  MeasurementVector out;
  std::transform(z.begin(), z.end(), out.begin(), [&](double v) { return std::min(v, d_tact_max); });
  return out;
}

MeasurementVector apply_sensing_mode(const MeasurementVector& z, const SensingConfig& mode) {
  return mode.mode == SensingMode::kTactile ? tactile_truncate(z, mode.d_tact_max) : z;
}

MeasurementVector MeasurementSimulator::simulate(const JointVector& joints, const Vec2& object, double radius,
                                                 const HandParams& hand, const SensingConfig& mode) {
  const SensorRange range = sensor_range(hand);
  MeasurementVector z = expected_measurements(joints, object, radius, hand);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double& v : z) {
    const double outlier_draw = unit(rng_);
    const double uniform_draw = range.min + unit(rng_) * (range.max - range.min);
    const double noise = noise_.sigma * gauss(rng_);
    v = outlier_draw < noise_.outlier_rate ? uniform_draw : v + noise;
    v = std::clamp(v, range.min, range.max);
  }
  return apply_sensing_mode(z, mode);
}

}  // namespace pretouch
