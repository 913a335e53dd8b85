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
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pretouch/config.hpp"
#include "pretouch/parallel.hpp"
#include "pretouch/stats.hpp"

namespace pretouch {

// Where the controller's object estimate comes from.
enum class EstimationMode { kFiducial, kProximity, kTactile };

[[nodiscard]] std::string_view to_string(EstimationMode mode);
[[nodiscard]] std::optional<EstimationMode> parse_estimation_mode(std::string_view s);

inline constexpr std::array<EstimationMode, 3> kAllModes = {EstimationMode::kFiducial, EstimationMode::kProximity,
                                                            EstimationMode::kTactile};

struct TrialConfig {
  EstimationMode mode = EstimationMode::kProximity;
  std::uint64_t seed = 0;
  ExperimentConfig params;
};

struct PoseErrorSample {
  double time = 0.0;
  double error = 0.0;
};

struct TrialResult {
  EstimationMode mode = EstimationMode::kProximity;
  std::uint64_t seed = 0;
  bool success = false;
  // Euclidean and horizontal ground-truth distance to the goal at the last tick.
  double final_goal_distance = 0.0;
  double final_horizontal_distance = 0.0;
  // Time average of |estimate - ground truth| over control ticks.
  double avg_pose_error = 0.0;
  // Simulated seconds from first contact to termination.
  double exec_time = 0.0;
  int ticks = 0;
  std::vector<PoseErrorSample> pose_error_trace;

  // Filter instrumentation.
  int filter_updates = 0;
  int degenerate_events = 0;
  double max_weight_sum_error = 0.0;
  // Tactile mode only: measurements and expected measurements were both
  // truncated on every update.
  bool tactile_truncation_verified = false;
  std::string diagnostic;
};

// Derives an independent stream seed; equal (seed, stream) pairs agree across
// modes so paired trials share noise.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Runs one trial from the preset contact pose until success or timeout. When
// `trace` is given one JSON record per control tick is written to it. Throws
// Error(kConfigError) when the preset pose is unreachable.
[[nodiscard]] TrialResult run_trial(const TrialConfig& cfg, std::ostream* trace = nullptr,
                                    Execution exec = Execution::kParallel);

struct ModeSummary {
  EstimationMode mode = EstimationMode::kProximity;
  int trials = 0;
  int successes = 0;
  double avg_pose_error_mean = 0.0;
  double avg_pose_error_std = 0.0;
  // Over successful trials only.
  double goal_distance_mean = 0.0;
  double goal_distance_std = 0.0;
  double exec_time_mean = 0.0;
  double exec_time_std = 0.0;
};

struct SignificanceTest {
  std::string metric;
  EstimationMode a = EstimationMode::kProximity;
  EstimationMode b = EstimationMode::kTactile;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  MannWhitneyResult result;
};

struct ExperimentSummary {
  std::vector<ModeSummary> modes;
  std::vector<SignificanceTest> tests;
  bool complete = true;
};

[[nodiscard]] ModeSummary summarize_mode(EstimationMode mode, std::span<const TrialResult> results);

// Per-mode summaries plus proximity-vs-tactile U tests on average pose error
// and final goal distance (successful trials) when both modes are present.
[[nodiscard]] ExperimentSummary summarize(std::span<const TrialResult> results);

struct PoseErrorTracePoint {
  EstimationMode mode = EstimationMode::kProximity;
  double time = 0.0;
  double mean = 0.0;
  double std = 0.0;
  int count = 0;
};

// Mean and standard deviation of pose error per mode on the control grid,
// averaged over the trials still running at each time.
[[nodiscard]] std::vector<PoseErrorTracePoint> pose_error_trace_export(std::span<const TrialResult> results,
                                                                       double dt);

struct ExperimentOptions {
  std::vector<EstimationMode> modes{kAllModes.begin(), kAllModes.end()};
  int trials = 10;
  std::uint64_t base_seed = 0;
  std::filesystem::path out_dir;
  bool write_traces = true;
  // Polled between trials; a set flag stops the run with partial results.
  const std::atomic<bool>* interrupt = nullptr;
  Execution exec = Execution::kParallel;
};

struct ExperimentRun {
  std::vector<TrialResult> results;
  ExperimentSummary summary;
};

// Runs `trials` seeds (base_seed + i) per mode and writes trials.csv,
// summary.csv, significance.csv, pose_error_trace.csv and one
// trace_<mode>_<seed>.jsonl per trial into out_dir.
[[nodiscard]] ExperimentRun run_experiment(const ExperimentConfig& params, const ExperimentOptions& options);

// CSV writers, also used by the tests to check the on-disk format.
void write_trials_header(std::ostream& out);
void write_trial_row(std::ostream& out, const TrialResult& r);
void write_summary_csv(std::ostream& out, const ExperimentSummary& summary);
void write_significance_csv(std::ostream& out, const ExperimentSummary& summary);
void write_pose_error_trace_csv(std::ostream& out, std::span<const PoseErrorTracePoint> points);

}  // namespace pretouch
