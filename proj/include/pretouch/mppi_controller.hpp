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
#include <span>
#include <vector>

#include "pretouch/parallel.hpp"
#include "pretouch/world_sim.hpp"

namespace pretouch {

enum class GoalDistanceMetric { kEuclidean, kHorizontal };

struct MppiParams {
  int num_rollouts = 297;
  int horizon = 10;
  double lambda = 0.1;
  double a1 = 0.1;
  double a2 = 200.0;
  double phi = 0.25;
  double motor_noise_sigma = 0.08;
  // Goal distances are converted from mm before weighting by a2 (mm -> m).
  double distance_scale = 1e-3;
  GoalDistanceMetric goal_distance = GoalDistanceMetric::kEuclidean;
  // Replace the last noisy sample of each configuration with one that holds
  // the current joint angles.
  bool hold_sample = true;

  [[nodiscard]] int rollouts_per_config() const { return num_rollouts / BrakeConfig::kCount; }
};

void validate(const MppiParams& params);

// Motor targets over the horizon under one fixed brake configuration.
struct ActionSequence {
  BrakeConfig brake;
  std::vector<std::array<double, kNumFingers>> motor_commands;

  [[nodiscard]] HybridAction action_at(int t) const { return {motor_commands[t], brake}; }
  [[nodiscard]] int length() const { return static_cast<int>(motor_commands.size()); }
};

struct ControllerState {
  std::array<ActionSequence, BrakeConfig::kCount> nominal;
  BrakeConfig active_brake;
  double active_cost = 0.0;
  bool started = false;
};

// Every configuration's nominal holds its free joints at their current angles.
[[nodiscard]] ControllerState initial_controller_state(const JointVector& joints, const MppiParams& params);

// a1 * (fingertips out of contact, summed over all states) + a2 * terminal
// goal distance.
[[nodiscard]] double trajectory_cost(std::span<const WorldState> states, const MppiParams& params,
                                     const WorldParams& world);

// rollouts_per_config sequences per brake configuration, grouped by
// configuration index; the first of each group is the unperturbed nominal.
// With `current` given and params.hold_sample set, the last of each group
// holds those joint angles for the whole horizon.
[[nodiscard]] std::vector<ActionSequence> sample_sequences(const ControllerState& ctrl, const MppiParams& params,
                                                           const HandParams& hand, std::mt19937_64& rng,
                                                           const JointVector* current = nullptr);

// Simulates every sequence from `state` and returns its trajectory cost.
[[nodiscard]] std::vector<double> rollout_batch(const WorldState& state, std::span<const ActionSequence> sequences,
                                                const WorldParams& world, const MppiParams& params,
                                                Execution exec = Execution::kParallel);

// w_k proportional to exp(-(J_k - min J) / lambda), normalized.
[[nodiscard]] std::vector<double> softmin_weights(std::span<const double> costs, double lambda);

[[nodiscard]] ActionSequence mppi_average(std::span<const ActionSequence> sequences, std::span<const double> costs,
                                          double lambda);

struct Selection {
  HybridAction action;
  ControllerState next;
  int chosen = 0;
  bool switched = false;
};

// Picks the global argmin on the first tick. Afterwards another brake
// configuration is adopted only when its cost is below (1 - phi) times the
// active one. The chosen configuration's nominal is advanced by one step;
// the others keep their averaged sequences.
[[nodiscard]] Selection select_action(const ControllerState& ctrl, std::span<const ActionSequence> averaged,
                                      std::span<const double> costs, const MppiParams& params);

class MppiController {
 public:
  struct Tick {
    HybridAction action;
    std::array<double, BrakeConfig::kCount> config_costs{};
    bool switched = false;
  };

  MppiController(const WorldParams& world, const MppiParams& params, std::uint64_t seed);

  // `planning_state` carries measured joints and the estimated object.
  Tick compute(const WorldState& planning_state, Execution exec = Execution::kParallel);

  [[nodiscard]] const ControllerState& state() const { return ctrl_; }

 private:
  WorldParams world_;
  MppiParams params_;
  ControllerState ctrl_;
  std::mt19937_64 rng_;
};

}  // namespace pretouch
