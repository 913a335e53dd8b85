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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "pretouch/sensor_sim.hpp"
#include "pretouch/world_sim.hpp"
#include "test_util.hpp"

using namespace pretouch;

namespace {

constexpr SensorRange kRange{10.0, 255.0};

double marched(const SensorFrame& f, const Vec2& center, double radius, const SensorRange& range) {
  const double t = oracle::march_ray({f.origin.x, f.origin.y}, {f.direction.x, f.direction.y}, {center.x, center.y},
                                     radius, range.max, 0.01, range.max);
  return std::clamp(t, range.min, range.max);
}

}  // namespace

TEST_CASE("raycast head-on hit reads centre distance minus radius") {
  const SensorFrame f{{0.0, 0.0}, {1.0, 0.0}};
  CHECK(raycast_cylinder(f, {100.0, 0.0}, 40.0, kRange) == doctest::Approx(60.0).epsilon(1e-12));
}

TEST_CASE("raycast miss reads the maximum range") {
  const SensorFrame f{{0.0, 0.0}, {0.0, 1.0}};
  CHECK(raycast_cylinder(f, {100.0, 0.0}, 40.0, kRange) == 255.0);
}

TEST_CASE("raycast off-axis hit matches the marching oracle") {
  const SensorFrame f{{0.0, 0.0}, {1.0, 0.0}};
  const double got = raycast_cylinder(f, {100.0, 30.0}, 40.0, kRange);
  CHECK(got == doctest::Approx(100.0 - std::sqrt(700.0)).epsilon(1e-12));
  CHECK(got == doctest::Approx(73.5425).epsilon(1e-6));
  CHECK(std::abs(got - marched(f, {100.0, 30.0}, 40.0, kRange)) < 0.01);
}

TEST_CASE("raycast edge cases") {
  const SensorFrame f{{0.0, 0.0}, {1.0, 0.0}};
  // Circle behind the sensor.
  CHECK(raycast_cylinder(f, {-100.0, 0.0}, 40.0, kRange) == 255.0);
  // Sensor inside the circle.
  CHECK(raycast_cylinder(f, {5.0, 0.0}, 40.0, kRange) == 10.0);
  // Hit closer than the minimum range is clamped up.
  CHECK(raycast_cylinder(f, {45.0, 0.0}, 40.0, kRange) == 10.0);
  // Hit beyond the maximum range is clamped down.
  CHECK(raycast_cylinder(f, {400.0, 0.0}, 40.0, kRange) == 255.0);
}

TEST_CASE("raycast agrees with the marching oracle on 1000 random configurations") {
  const HandParams hand;
  const SensorRange range = sensor_range(hand);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> dist(20.0, 200.0);
  double worst = 0.0;
  int hits = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const JointVector q = testutil::random_joints(rng, hand);
    const auto tips = fingertip_centers(q, hand);
    const double a = angle(rng);
    const Vec2 object = tips[trial % 2] + Vec2{std::cos(a), std::sin(a)} * dist(rng);
    const SensorFrames frames = sensor_frames(q, hand);
    for (const SensorFrame& f : frames) {
      const double got = raycast_cylinder(f, object, 40.0, range);
      worst = std::max(worst, std::abs(got - marched(f, object, 40.0, range)));
      if (got > range.min && got < range.max) ++hits;
    }
  }
  CHECK(worst < 0.05);
  CHECK(hits > 500);
}

TEST_CASE("an object far beyond every ray reads maximum range on all beams") {
  const HandParams hand;
  const MeasurementVector z = expected_measurements(JointVector{}, {0.0, 255.0 + 40.0 + 500.0}, 40.0, hand);
  for (double v : z) CHECK(v == 255.0);
}

TEST_CASE("mirrored state reverses the measurement vector") {
  const HandParams hand;
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> ux(-80.0, 80.0);
  std::uniform_real_distribution<double> uy(20.0, 160.0);
  for (int trial = 0; trial < 300; ++trial) {
    const JointVector q = testutil::random_joints(rng, hand);
    const Vec2 obj{ux(rng), uy(rng)};
    const MeasurementVector z = expected_measurements(q, obj, 40.0, hand);
    const MeasurementVector m = expected_measurements(mirrored(q), {-obj.x, obj.y}, 40.0, hand);
    for (int j = 0; j < kNumBeams; ++j) CHECK(m[kNumBeams - 1 - j] == doctest::Approx(z[j]).epsilon(1e-9));
  }
}

TEST_CASE("the preset grasp has a close beam on each finger") {
  const WorldParams world;
  const WorldState s = preset_contact_pose(world);
  const SensorFrames frames = sensor_frames(s.joints, world.hand);
  const MeasurementVector z = expected_measurements(frames, s.object_position, world.object.radius,
                                                    sensor_range(world.hand));
  for (int f = 0; f < kNumFingers; ++f) {
    double closest = 1e9;
    for (int k = 0; k < kSensorsPerTip; ++k) {
      const int j = f * kSensorsPerTip + k;
      closest = std::min(closest, z[j]);
      CHECK(std::abs(z[j] - marched(frames[j], s.object_position, world.object.radius, sensor_range(world.hand))) <
            0.05);
    }
    CHECK(closest < 30.0);
  }
}

TEST_CASE("noiseless simulation equals the expected measurements") {
  const WorldParams world;
  const WorldState s = preset_contact_pose(world);
  MeasurementSimulator sim({0.0, 0.0, 7});
  const MeasurementVector z = sim.simulate(s.joints, s.object_position, 40.0, world.hand, {});
  CHECK(z == expected_measurements(s.joints, s.object_position, 40.0, world.hand));
}

TEST_CASE("simulated measurements are reproducible and stay in range") {
  const WorldParams world;
  const WorldState s = preset_contact_pose(world);
  MeasurementSimulator a({5.0, 0.01, 99});
  MeasurementSimulator b({5.0, 0.01, 99});
  for (int t = 0; t < 200; ++t) {
    const MeasurementVector za = a.simulate(s.joints, s.object_position, 40.0, world.hand, {});
    CHECK(za == b.simulate(s.joints, s.object_position, 40.0, world.hand, {}));
    for (double v : za) {
      CHECK(v >= 10.0);
      CHECK(v <= 255.0);
    }
  }
}

TEST_CASE("noise is centred on the expected reading") {
  const HandParams hand;
  // Head-on beam far from both range limits.
  const JointVector q;
  const SensorFrames frames = sensor_frames(q, hand);
  const Vec2 object = frames[0].origin + frames[0].direction * 140.0;
  const double expected = expected_measurements(q, object, 40.0, hand)[0];
  CHECK(expected == doctest::Approx(100.0));
  MeasurementSimulator sim({5.0, 0.0, 3});
  double sum = 0.0;
  double sq = 0.0;
  const int n = 20000;
  for (int t = 0; t < n; ++t) {
    const double v = sim.simulate(q, object, 40.0, hand, {})[0] - expected;
    sum += v;
    sq += v * v;
  }
  CHECK(std::abs(sum / n) < 0.15);
  CHECK(std::sqrt(sq / n) == doctest::Approx(5.0).epsilon(0.03));
}

TEST_CASE("tactile mode truncates simulated readings with the same noise stream") {
  const WorldParams world;
  const WorldState s = preset_contact_pose(world);
  MeasurementSimulator prox({5.0, 0.01, 5});
  MeasurementSimulator tact({5.0, 0.01, 5});
  const SensingConfig tactile{SensingMode::kTactile, 18.0};
  for (int t = 0; t < 50; ++t) {
    const MeasurementVector zp = prox.simulate(s.joints, s.object_position, 40.0, world.hand, {});
    CHECK(tact.simulate(s.joints, s.object_position, 40.0, world.hand, tactile) == tactile_truncate(zp, 18.0));
  }
}

TEST_CASE("tactile truncation clips at the contact threshold") {
  const MeasurementVector z = {12.0, 200.0, 18.0, 255.0, 17.9, 30.0, 10.0, 255.0};
  const MeasurementVector t = tactile_truncate(z, 18.0);
  CHECK(t == MeasurementVector{12.0, 18.0, 18.0, 18.0, 17.9, 18.0, 10.0, 18.0});
  const MeasurementVector low = {10.0, 11.0, 12.0, 13.0, 14.0, 15.0, 16.0, 18.0};
  CHECK(tactile_truncate(low, 18.0) == low);
  CHECK(apply_sensing_mode(z, {SensingMode::kProximity, 18.0}) == z);
  CHECK(apply_sensing_mode(z, {SensingMode::kTactile, 18.0}) == t);
}

TEST_CASE("tactile truncation is idempotent") {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(10.0, 255.0);
  for (int trial = 0; trial < 1000; ++trial) {
    MeasurementVector z;
    for (double& v : z) v = u(rng);
    const MeasurementVector once = tactile_truncate(z, 18.0);
    CHECK(tactile_truncate(once, 18.0) == once);
    for (int j = 0; j < kNumBeams; ++j) CHECK(once[j] <= z[j]);
  }
}

TEST_CASE("tactile truncation destroys range information") {
  const HandParams hand;
  const JointVector q;
  const SensorFrames frames = sensor_frames(q, hand);
  // Two objects straight ahead of beam 0 at different ranges, both beyond the threshold.
  const Vec2 near = frames[0].origin + frames[0].direction * 80.0;
  const Vec2 far = frames[0].origin + frames[0].direction * 120.0;
  const MeasurementVector zn = expected_measurements(q, near, 40.0, hand);
  const MeasurementVector zf = expected_measurements(q, far, 40.0, hand);
  CHECK(zn != zf);
  CHECK(zn[0] == doctest::Approx(40.0));
  CHECK(zf[0] == doctest::Approx(80.0));
  CHECK(tactile_truncate(zn, 18.0) == tactile_truncate(zf, 18.0));
}

TEST_CASE("moving the cylinder 1 mm towards a sensor along its beam shortens the reading by 1 mm") {
  const HandParams hand;
  const SensorRange range = sensor_range(hand);
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> lateral(-30.0, 30.0);
  std::uniform_real_distribution<double> along(60.0, 250.0);
  for (int trial = 0; trial < 500; ++trial) {
    const SensorFrames frames = sensor_frames(testutil::random_joints(rng, hand), hand);
    const SensorFrame& f = frames[trial % kNumBeams];
    const Vec2 normal{-f.direction.y, f.direction.x};
    const Vec2 obj = f.origin + f.direction * along(rng) + normal * lateral(rng);
    const double before = raycast_cylinder(f, obj, 40.0, range);
    const double after = raycast_cylinder(f, obj - f.direction, 40.0, range);
    if (before < range.max && before - 1.0 > range.min) CHECK(after == doctest::Approx(before - 1.0).epsilon(1e-9));
  }
}
