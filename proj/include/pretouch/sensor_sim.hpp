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
#include <cstdint>
#include <random>
#include <string_view>

#include "pretouch/hand_model.hpp"
#include "pretouch/vec2.hpp"

namespace pretouch {

// Eight beam distances (mm): left fingertip sensors 1-4, then right 1-4.
// A beam that sees nothing reads exactly the maximum range.
using MeasurementVector = std::array<double, kNumBeams>;

struct SensorNoiseParams {
  double sigma = 5.0;
  double outlier_rate = 0.01;
  std::uint64_t seed = 0;
};

enum class SensingMode { kProximity, kTactile };

[[nodiscard]] std::string_view to_string(SensingMode mode);

struct SensingConfig {
  SensingMode mode = SensingMode::kProximity;
  double d_tact_max = 18.0;
};

struct SensorRange {
  double min = 10.0;
  double max = 255.0;
};

[[nodiscard]] inline SensorRange sensor_range(const HandParams& hand) {
  return {hand.sensor_range_min, hand.sensor_range_max};
}

// Distance along the beam to the first intersection with the circle, clamped
// to the sensor range. Misses, and circles entirely behind the sensor, read
// range.max; a sensor inside the circle reads range.min.
[[nodiscard]] double raycast_cylinder(const SensorFrame& frame, const Vec2& center, double radius,
                                      const SensorRange& range);

[[nodiscard]] MeasurementVector expected_measurements(const SensorFrames& frames, const Vec2& object,
                                                      double radius, const SensorRange& range);

[[nodiscard]] MeasurementVector expected_measurements(const JointVector& joints, const Vec2& object,
                                                      double radius, const HandParams& hand);

[[nodiscard]] MeasurementVector tactile_truncate(const MeasurementVector& z, double d_tact_max);

// Applies the mode's truncation (identity in proximity mode).
[[nodiscard]] MeasurementVector apply_sensing_mode(const MeasurementVector& z, const SensingConfig& mode);

// Seeded generator of noisy readings. Every beam consumes the same number of
// random draws regardless of mode, so equal seeds share noise streams.
class MeasurementSimulator {
 public:
  explicit MeasurementSimulator(const SensorNoiseParams& noise) : noise_(noise), rng_(noise.seed) {}

  [[nodiscard]] MeasurementVector simulate(const JointVector& joints, const Vec2& object, double radius,
                                           const HandParams& hand, const SensingConfig& mode);

  [[nodiscard]] const SensorNoiseParams& noise() const { return noise_; }

 private:
  SensorNoiseParams noise_;
  std::mt19937_64 rng_;
};

}  // namespace pretouch
