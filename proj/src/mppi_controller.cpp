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

#include "pretouch/mppi_controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pretouch/error.hpp"

namespace pretouch {

namespace {

double goal_term(const Vec2& object, const MppiParams& params, const WorldParams& world) {
  const Vec2 d = world.object.goal_position - object;
  const double mm = params.goal_distance == GoalDistanceMetric::kHorizontal ? std::abs(d.x) : d.norm();
  return params.a2 * params.distance_scale * mm;
}

// Same cost as trajectory_cost without materializing the trajectory.
double rollout_cost(const WorldState& start, const ActionSequence& seq, const WorldParams& world,
                    const MppiParams& params) {
  WorldState s = start;
  int missing = missing_contacts(s, world);
  for (int t = 0; t < seq.length(); ++t) {
    s = step(s, seq.action_at(t), world);
    missing += missing_contacts(s, world);
  }
  return params.a1 * missing + goal_term(s.object_position, params, world);
}

ActionSequence shifted(const ActionSequence& seq) {
  ActionSequence out = seq;
  if (out.motor_commands.size() > 1) {
    std::rotate(out.motor_commands.begin(), out.motor_commands.begin() + 1, out.motor_commands.end());
    out.motor_commands.back() = seq.motor_commands.back();
  }
  return out;
}

}  // namespace

void validate(const MppiParams& params) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfigError, "mppi: " + what); };
  if (params.num_rollouts < BrakeConfig::kCount || params.num_rollouts % BrakeConfig::kCount != 0) {
    fail("num_rollouts must be a positive multiple of 9");
  }
  if (params.horizon < 1) fail("horizon must be >= 1");
  if (!(params.lambda > 0.0)) fail("lambda must be positive");
  if (!(params.phi >= 0.0 && params.phi < 1.0)) fail("phi must be in [0, 1)");
  if (!(params.motor_noise_sigma >= 0.0)) fail("motor_noise_sigma must be >= 0");
  if (!(params.a1 >= 0.0 && params.a2 >= 0.0)) fail("cost weights must be nonnegative");
}

ControllerState initial_controller_state(const JointVector& joints, const MppiParams& params) {
  ControllerState ctrl;
  for (int c = 0; c < BrakeConfig::kCount; ++c) {
    const BrakeConfig brake = BrakeConfig::from_index(c);
    const std::array<double, kNumFingers> hold = {joints.at(0, brake.left_free), joints.at(1, brake.right_free)};
    ctrl.nominal[c] = {brake, std::vector<std::array<double, kNumFingers>>(params.horizon, hold)};
  }
  return ctrl;
}

double trajectory_cost(std::span<const WorldState> states, const MppiParams& params, const WorldParams& world) {
  int missing = 0;
  for (const WorldState& s : states) missing += missing_contacts(s, world);
  return params.a1 * missing + goal_term(states.back().object_position, params, world);
}

std::vector<ActionSequence> sample_sequences(const ControllerState& ctrl, const MppiParams& params,
                                             const HandParams& hand, std::mt19937_64& rng,
                                             const JointVector* current) {
  const int per_config = params.rollouts_per_config();
  std::vector<ActionSequence> out;
  out.reserve(static_cast<std::size_t>(per_config) * BrakeConfig::kCount);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (const ActionSequence& nominal : ctrl.nominal) {
    out.push_back(nominal);
    for (int k = 1; k < per_config; ++k) {
      ActionSequence seq = nominal;
      for (auto& cmd : seq.motor_commands) {
        for (double& m : cmd) {
          m = std::clamp(m + params.motor_noise_sigma * gauss(rng), hand.joint_limit_low, hand.joint_limit_high);
        }
      }
      out.push_back(std::move(seq));
    }
    if (params.hold_sample && current != nullptr && per_config > 1) {
      ActionSequence& hold = out.back();
      for (auto& cmd : hold.motor_commands) {
        for (int f = 0; f < kNumFingers; ++f) cmd[f] = current->at(f, nominal.brake.free_joint(f));
      }
    }
  }
  return out;
}

std::vector<double> rollout_batch(const WorldState& state, std::span<const ActionSequence> sequences,
                                  const WorldParams& world, const MppiParams& params, Execution exec) {
  const auto n = static_cast<std::ptrdiff_t>(sequences.size());
  std::vector<double> costs(sequences.size());
  if (exec == Execution::kParallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t k = 0; k < n; ++k) costs[k] = rollout_cost(state, sequences[k], world, params);
  } else {
    for (std::ptrdiff_t k = 0; k < n; ++k) costs[k] = rollout_cost(state, sequences[k], world, params);
  }
  return costs;
}

std::vector<double> softmin_weights(std::span<const double> costs, double lambda) {
  const double best = *std::min_element(costs.begin(), costs.end());
  std::vector<double> w(costs.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < costs.size(); ++k) {
    w[k] = std::exp(-(costs[k] - best) / lambda);
    sum += w[k];
  }
  for (double& v : w) v /= sum;
  return w;
}

ActionSequence mppi_average(std::span<const ActionSequence> sequences, std::span<const double> costs,
                            double lambda) {
  if (sequences.empty() || sequences.size() != costs.size()) {
    throw Error(ErrorCode::kInvalidArgument, "mppi_average needs one cost per sequence");
  }
  const std::vector<double> w = softmin_weights(costs, lambda);
  ActionSequence out = sequences.front();
  for (auto& cmd : out.motor_commands) cmd = {0.0, 0.0};
  for (std::size_t k = 0; k < sequences.size(); ++k) {
    for (int t = 0; t < out.length(); ++t) {
      for (int f = 0; f < kNumFingers; ++f) out.motor_commands[t][f] += w[k] * sequences[k].motor_commands[t][f];
    }
  }
  // Rounding must not leave the hull of the samples.
  for (int t = 0; t < out.length(); ++t) {
    for (int f = 0; f < kNumFingers; ++f) {
      double lo = sequences.front().motor_commands[t][f];
      double hi = lo;
      for (const ActionSequence& s : sequences) {
        lo = std::min(lo, s.motor_commands[t][f]);
        hi = std::max(hi, s.motor_commands[t][f]);
      }
      out.motor_commands[t][f] = std::clamp(out.motor_commands[t][f], lo, hi);
    }
  }
  return out;
}

Selection select_action(const ControllerState& ctrl, std::span<const ActionSequence> averaged,
                        std::span<const double> costs, const MppiParams& params) {
  if (averaged.size() != BrakeConfig::kCount || costs.size() != BrakeConfig::kCount) {
    throw Error(ErrorCode::kInvalidArgument, "select_action needs one sequence per brake configuration");
  }
  const int best = static_cast<int>(std::min_element(costs.begin(), costs.end()) - costs.begin());
  int chosen = best;
  if (ctrl.started) {
    const int active = ctrl.active_brake.index();
    chosen = costs[best] < (1.0 - params.phi) * costs[active] ? best : active;
  }

  Selection sel;
  sel.chosen = chosen;
  sel.switched = ctrl.started && chosen != ctrl.active_brake.index();
  sel.action = averaged[chosen].action_at(0);
  sel.next.started = true;
  sel.next.active_brake = BrakeConfig::from_index(chosen);
  sel.next.active_cost = costs[chosen];
  for (int c = 0; c < BrakeConfig::kCount; ++c) {
    sel.next.nominal[c] = c == chosen ? shifted(averaged[c]) : averaged[c];
  }
  return sel;
}

MppiController::MppiController(const WorldParams& world, const MppiParams& params, std::uint64_t seed)
    : world_(world), params_(params), rng_(seed) {
  validate(params_);
}

MppiController::Tick MppiController::compute(const WorldState& planning_state, Execution exec) {
  if (!ctrl_.started) ctrl_ = initial_controller_state(planning_state.joints, params_);

  const std::vector<ActionSequence> samples = sample_sequences(ctrl_, params_, world_.hand, rng_, &planning_state.joints);
  const std::vector<double> costs = rollout_batch(planning_state, samples, world_, params_, exec);

  const auto per_config = static_cast<std::size_t>(params_.rollouts_per_config());
  std::vector<ActionSequence> averaged;
  averaged.reserve(BrakeConfig::kCount);
  for (std::size_t c = 0; c < BrakeConfig::kCount; ++c) {
    averaged.push_back(mppi_average(std::span(samples).subspan(c * per_config, per_config),
                                    std::span(costs).subspan(c * per_config, per_config), params_.lambda));
  }
  const std::vector<double> averaged_costs = rollout_batch(planning_state, averaged, world_, params_, exec);

  Selection sel = select_action(ctrl_, averaged, averaged_costs, params_);
  ctrl_ = std::move(sel.next);

  Tick tick;
  tick.action = sel.action;
  tick.switched = sel.switched;
  std::copy(averaged_costs.begin(), averaged_costs.end(), tick.config_costs.begin());
  return tick;
}

}  // namespace pretouch
