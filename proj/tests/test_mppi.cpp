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
#include <numeric>
#include <random>
#include <vector>

#include "pretouch/error.hpp"
#include "pretouch/mppi_controller.hpp"
#include "test_util.hpp"

using namespace pretouch;

namespace {

WorldState touching_at(const Vec2& position) {
  WorldParams world;
  world.object.start_position = position;
  return preset_contact_pose(world);
}

// Mirror image of a preset grasp, for positions right of the midline.
WorldState touching_mirrored(const Vec2& position) {
  WorldState s = touching_at({-position.x, position.y});
  s.joints = mirrored(s.joints);
  s.object_position.x = -s.object_position.x;
  return s;
}

ActionSequence random_sequence(std::mt19937_64& rng, const BrakeConfig& brake, int horizon) {
  std::uniform_real_distribution<double> u(0.0, 1.5);
  ActionSequence s{brake, {}};
  for (int t = 0; t < horizon; ++t) s.motor_commands.push_back({u(rng), u(rng)});
  return s;
}

std::vector<ActionSequence> constant_sequences(int horizon) {
  std::vector<ActionSequence> out;
  for (int c = 0; c < BrakeConfig::kCount; ++c) {
    out.push_back({BrakeConfig::from_index(c), std::vector<std::array<double, kNumFingers>>(horizon, {0.1 * c, 0.2})});
  }
  return out;
}

}  // namespace

TEST_CASE("trajectory cost vanishes with full contact at the goal") {
  const WorldParams world;
  const WorldState s = touching_mirrored(world.object.goal_position);
  REQUIRE(missing_contacts(s, world) == 0);
  const std::vector<WorldState> states(11, s);
  CHECK(trajectory_cost(states, MppiParams{}, world) == 0.0);
}

TEST_CASE("trajectory cost of ten contact-free states at the goal") {
  const WorldParams world;
  WorldState s;
  s.object_position = world.object.goal_position;
  REQUIRE(missing_contacts(s, world) == 2);
  const std::vector<WorldState> ten(10, s);
  CHECK(trajectory_cost(ten, MppiParams{}, world) == doctest::Approx(2.0).epsilon(1e-12));
  // A full rollout also counts its start state.
  const std::vector<WorldState> eleven(11, s);
  CHECK(trajectory_cost(eleven, MppiParams{}, world) == doctest::Approx(2.2).epsilon(1e-12));
}

TEST_CASE("trajectory cost of full contact 10 mm from the goal") {
  const WorldParams world;
  const WorldState s = touching_mirrored(world.object.goal_position - Vec2{10.0, 0.0});
  REQUIRE(missing_contacts(s, world) == 0);
  const std::vector<WorldState> states(11, s);
  const double by_hand = 200.0 * (10.0 / 1000.0);
  CHECK(trajectory_cost(states, MppiParams{}, world) == doctest::Approx(by_hand).epsilon(1e-12));
  MppiParams horizontal;
  horizontal.goal_distance = GoalDistanceMetric::kHorizontal;
  CHECK(trajectory_cost(states, horizontal, world) == doctest::Approx(by_hand).epsilon(1e-12));
}

TEST_CASE("goal distance metrics differ only in the height term") {
  const WorldParams world;
  WorldState s;
  s.object_position = world.object.goal_position + Vec2{3.0, 4.0};
  const std::vector<WorldState> one(1, s);
  MppiParams p;
  p.a1 = 0.0;
  CHECK(trajectory_cost(one, p, world) == doctest::Approx(200.0 * 0.005));
  p.goal_distance = GoalDistanceMetric::kHorizontal;
  CHECK(trajectory_cost(one, p, world) == doctest::Approx(200.0 * 0.003));
}

TEST_CASE("sampling draws 33 sequences per brake configuration") {
  const WorldParams world;
  const MppiParams params;
  const WorldState s = touching_at(world.object.start_position);
  ControllerState ctrl = initial_controller_state(s.joints, params);
  std::mt19937_64 rng(51);
  const std::vector<ActionSequence> samples = sample_sequences(ctrl, params, world.hand, rng, &s.joints);
  REQUIRE(samples.size() == 297);
  CHECK(params.rollouts_per_config() == 33);
  for (int c = 0; c < BrakeConfig::kCount; ++c) {
    const ActionSequence& nominal = samples[c * 33];
    CHECK(nominal.brake == BrakeConfig::from_index(c));
    CHECK(nominal.motor_commands == ctrl.nominal[c].motor_commands);
    for (int k = 0; k < 33; ++k) {
      const ActionSequence& seq = samples[c * 33 + k];
      CHECK(seq.brake == BrakeConfig::from_index(c));
      CHECK(seq.length() == params.horizon);
      for (const auto& cmd : seq.motor_commands) {
        for (double m : cmd) {
          CHECK(m >= world.hand.joint_limit_low);
          CHECK(m <= world.hand.joint_limit_high);
        }
      }
    }
    // The last sample holds the current joints.
    const ActionSequence& hold = samples[c * 33 + 32];
    for (const auto& cmd : hold.motor_commands) {
      CHECK(cmd[0] == s.joints.at(0, hold.brake.left_free));
      CHECK(cmd[1] == s.joints.at(1, hold.brake.right_free));
    }
  }
}

TEST_CASE("zero motor noise makes every sample the nominal") {
  const HandParams hand;
  MppiParams params;
  params.motor_noise_sigma = 0.0;
  params.hold_sample = false;
  std::mt19937_64 rng(52);
  ControllerState ctrl = initial_controller_state(testutil::random_joints(rng, hand), params);
  ctrl.nominal[4] = random_sequence(rng, BrakeConfig::from_index(4), params.horizon);
  const std::vector<ActionSequence> samples = sample_sequences(ctrl, params, hand, rng);
  for (int c = 0; c < BrakeConfig::kCount; ++c) {
    for (int k = 0; k < 33; ++k) CHECK(samples[c * 33 + k].motor_commands == ctrl.nominal[c].motor_commands);
  }
}

TEST_CASE("rollouts are deterministic and match a hand-composed trajectory") {
  const WorldParams world;
  const MppiParams params;
  const WorldState start = touching_at(world.object.start_position);
  std::mt19937_64 rng(53);
  std::vector<ActionSequence> seqs;
  for (int k = 0; k < 12; ++k) seqs.push_back(random_sequence(rng, testutil::random_brake(rng), params.horizon));
  seqs.push_back(seqs.front());
  const std::vector<double> costs = rollout_batch(start, seqs, world, params, Execution::kSerial);
  CHECK(costs.front() == costs.back());
  for (std::size_t k = 0; k < seqs.size(); ++k) {
    std::vector<WorldState> states = {start};
    for (int t = 0; t < params.horizon; ++t) states.push_back(step(states.back(), seqs[k].action_at(t), world));
    CHECK(costs[k] == doctest::Approx(trajectory_cost(states, params, world)).epsilon(1e-12));
  }
}

TEST_CASE("serial and parallel rollouts are bitwise identical") {
  const WorldParams world;
  const MppiParams params;
  const WorldState start = touching_at(world.object.start_position);
  std::mt19937_64 rng(54);
  const ControllerState ctrl = initial_controller_state(start.joints, params);
  const std::vector<ActionSequence> samples = sample_sequences(ctrl, params, world.hand, rng, &start.joints);
  CHECK(rollout_batch(start, samples, world, params, Execution::kSerial) ==
        rollout_batch(start, samples, world, params, Execution::kParallel));
}

TEST_CASE("softmin weights for equal costs are uniform") {
  const std::vector<double> costs(33, 1.7);
  const std::vector<double> w = softmin_weights(costs, 0.1);
  for (double v : w) CHECK(v == doctest::Approx(1.0 / 33.0).epsilon(1e-12));
}

TEST_CASE("softmin weights for a cost gap of lambda ln 2") {
  const double lambda = 0.1;
  const std::vector<double> costs = {0.0, lambda * std::log(2.0)};
  const std::vector<double> w = softmin_weights(costs, lambda);
  CHECK(w[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("softmin weights sum to one and ignore a common cost offset") {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> costs(33);
    for (double& c : costs) c = u(rng);
    for (double lambda : {1e-6, 0.1, 1.0, 100.0}) {
      const std::vector<double> w = softmin_weights(costs, lambda);
      CHECK(std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0) < 1e-12);
      std::vector<double> shifted = costs;
      for (double& c : shifted) c += 1234.5;
      const std::vector<double> ws = softmin_weights(shifted, lambda);
      for (std::size_t k = 0; k < w.size(); ++k) CHECK(std::abs(w[k] - ws[k]) < 1e-12);
    }
  }
}

TEST_CASE("averaging with equal costs is the arithmetic mean") {
  std::mt19937_64 rng(56);
  std::vector<ActionSequence> seqs;
  for (int k = 0; k < 5; ++k) seqs.push_back(random_sequence(rng, BrakeConfig{1, 1}, 10));
  const std::vector<double> costs(5, 3.0);
  const ActionSequence avg = mppi_average(seqs, costs, 0.1);
  CHECK(avg.brake == BrakeConfig{1, 1});
  for (int t = 0; t < 10; ++t) {
    for (int f = 0; f < kNumFingers; ++f) {
      double mean = 0.0;
      for (const ActionSequence& s : seqs) mean += s.motor_commands[t][f] / 5.0;
      CHECK(avg.motor_commands[t][f] == doctest::Approx(mean).epsilon(1e-12));
    }
  }
}

TEST_CASE("a vanishing temperature selects the lowest-cost sequence") {
  std::mt19937_64 rng(57);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ActionSequence> seqs;
    std::vector<double> costs;
    for (int k = 0; k < 33; ++k) {
      seqs.push_back(random_sequence(rng, BrakeConfig{0, 2}, 10));
      costs.push_back(u(rng));
    }
    const auto best = std::min_element(costs.begin(), costs.end()) - costs.begin();
    const ActionSequence avg = mppi_average(seqs, costs, 1e-6);
    for (int t = 0; t < 10; ++t) {
      for (int f = 0; f < kNumFingers; ++f) CHECK(std::abs(avg.motor_commands[t][f] - seqs[best].motor_commands[t][f]) < 1e-3);
    }
  }
}

TEST_CASE("the average stays inside the hull of its samples") {
  std::mt19937_64 rng(58);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ActionSequence> seqs;
    std::vector<double> costs;
    for (int k = 0; k < 33; ++k) {
      seqs.push_back(random_sequence(rng, BrakeConfig{2, 0}, 10));
      costs.push_back(u(rng));
    }
    const ActionSequence avg = mppi_average(seqs, costs, 0.1);
    for (int t = 0; t < 10; ++t) {
      for (int f = 0; f < kNumFingers; ++f) {
        double lo = 1e9;
        double hi = -1e9;
        for (const ActionSequence& s : seqs) {
          lo = std::min(lo, s.motor_commands[t][f]);
          hi = std::max(hi, s.motor_commands[t][f]);
        }
        CHECK(avg.motor_commands[t][f] >= lo);
        CHECK(avg.motor_commands[t][f] <= hi);
      }
    }
  }
  CHECK_THROWS_AS((void)mppi_average({}, {}, 0.1), Error);
}

TEST_CASE("the first selection takes the global argmin") {
  const MppiParams params;
  const ControllerState ctrl = initial_controller_state(JointVector{}, params);
  std::vector<double> costs(9, 5.0);
  costs[6] = 1.0;
  const std::vector<ActionSequence> averaged = constant_sequences(params.horizon);
  const Selection sel = select_action(ctrl, averaged, costs, params);
  CHECK(sel.chosen == 6);
  CHECK_FALSE(sel.switched);
  CHECK(sel.action.brakes == BrakeConfig::from_index(6));
  CHECK(sel.action.motor_commands == averaged[6].motor_commands[0]);
  CHECK(sel.next.started);
  CHECK(sel.next.active_brake == BrakeConfig::from_index(6));
}

TEST_CASE("hysteresis keeps the active configuration unless the best is 25 percent cheaper") {
  const MppiParams params;
  ControllerState ctrl = initial_controller_state(JointVector{}, params);
  ctrl.started = true;
  ctrl.active_brake = BrakeConfig::from_index(2);
  const std::vector<ActionSequence> averaged = constant_sequences(params.horizon);
  std::vector<double> costs(9, 200.0);
  costs[2] = 100.0;
  costs[7] = 80.0;
  Selection sel = select_action(ctrl, averaged, costs, params);
  CHECK(sel.chosen == 2);
  CHECK_FALSE(sel.switched);
  costs[7] = 74.0;
  sel = select_action(ctrl, averaged, costs, params);
  CHECK(sel.chosen == 7);
  CHECK(sel.switched);
  CHECK(sel.action.brakes == BrakeConfig::from_index(7));
}

TEST_CASE("only the chosen configuration's nominal is advanced") {
  const MppiParams params;
  std::mt19937_64 rng(59);
  std::vector<ActionSequence> averaged;
  for (int c = 0; c < 9; ++c) averaged.push_back(random_sequence(rng, BrakeConfig::from_index(c), params.horizon));
  std::vector<double> costs(9, 2.0);
  costs[3] = 1.0;
  const Selection sel = select_action(initial_controller_state(JointVector{}, params), averaged, costs, params);
  for (int c = 0; c < 9; ++c) {
    const auto& next = sel.next.nominal[c].motor_commands;
    if (c == 3) {
      for (int t = 0; t + 1 < params.horizon; ++t) CHECK(next[t] == averaged[c].motor_commands[t + 1]);
      CHECK(next.back() == averaged[c].motor_commands.back());
    } else {
      CHECK(next == averaged[c].motor_commands);
    }
  }
}

TEST_CASE("frozen costs within the hysteresis band never switch over 100 ticks") {
  const MppiParams params;
  std::mt19937_64 rng(60);
  std::uniform_real_distribution<double> u(0.76, 1.0);
  ControllerState ctrl = initial_controller_state(JointVector{}, params);
  const std::vector<ActionSequence> averaged = constant_sequences(params.horizon);
  std::vector<double> costs(9);
  for (double& c : costs) c = u(rng);
  costs[5] = 0.99;
  // Make configuration 5 the first-tick argmin, then freeze new costs.
  std::vector<double> first(9, 2.0);
  first[5] = 1.0;
  Selection sel = select_action(ctrl, averaged, first, params);
  REQUIRE(sel.chosen == 5);
  ctrl = sel.next;
  for (int tick = 0; tick < 100; ++tick) {
    sel = select_action(ctrl, averaged, costs, params);
    CHECK(sel.chosen == 5);
    CHECK_FALSE(sel.switched);
    CHECK(sel.action.brakes == BrakeConfig::from_index(5));
    ctrl = sel.next;
  }
}

TEST_CASE("controller ticks are reproducible for a fixed seed") {
  const WorldParams world;
  const MppiParams params;
  const WorldState s = touching_at(world.object.start_position);
  MppiController a(world, params, 77);
  MppiController b(world, params, 77);
  for (int t = 0; t < 3; ++t) {
    const MppiController::Tick ta = a.compute(s, Execution::kSerial);
    const MppiController::Tick tb = b.compute(s, Execution::kParallel);
    CHECK(ta.action.brakes == tb.action.brakes);
    CHECK(ta.action.motor_commands == tb.action.motor_commands);
    CHECK(ta.config_costs == tb.config_costs);
  }
}

TEST_CASE("invalid controller parameters are rejected") {
  MppiParams p;
  CHECK_NOTHROW(validate(p));
  p.num_rollouts = 100;
  CHECK_THROWS_AS(validate(p), Error);
  p = MppiParams{};
  p.lambda = 0.0;
  CHECK_THROWS_AS(validate(p), Error);
  p = MppiParams{};
  p.phi = 1.0;
  CHECK_THROWS_AS(validate(p), Error);
}
