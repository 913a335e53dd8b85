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

#include <atomic>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pretouch/config.hpp"
#include "pretouch/error.hpp"
#include "pretouch/experiment.hpp"
#include "pretouch/sensor_sim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIncomplete = 3;

std::atomic<bool> g_interrupt{false};

extern "C" void on_sigint(int) { g_interrupt.store(true); }

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

pretouch::ExperimentConfig load_or_default(const std::string& path) {
  return path.empty() ? pretouch::ExperimentConfig{} : pretouch::load_config(path);
}

int run_trial_cmd(const std::string& mode_text, std::uint64_t seed, const std::string& config_path,
                  const std::filesystem::path& out) {
  const auto mode = pretouch::parse_estimation_mode(mode_text);
  if (!mode) throw pretouch::Error(pretouch::ErrorCode::kConfigError, "unknown mode: " + mode_text);
  pretouch::TrialConfig cfg{*mode, seed, load_or_default(config_path)};
  std::filesystem::create_directories(out);
  std::ofstream trace(out / ("trace_" + mode_text + "_" + std::to_string(seed) + ".jsonl"));
  const pretouch::TrialResult r = pretouch::run_trial(cfg, &trace);

  std::ofstream trials(out / "trials.csv");
  pretouch::write_trials_header(trials);
  pretouch::write_trial_row(trials, r);
  pretouch::write_trials_header(std::cout);
  pretouch::write_trial_row(std::cout, r);
  return kExitOk;
}

int run_experiment_cmd(int trials, const std::string& modes_text, std::uint64_t base_seed,
                       const std::string& config_path, const std::filesystem::path& out) {
  pretouch::ExperimentOptions options;
  options.trials = trials;
  options.base_seed = base_seed;
  options.out_dir = out;
  options.interrupt = &g_interrupt;
  if (modes_text != "all") {
    options.modes.clear();
    std::stringstream ss(modes_text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto m = pretouch::parse_estimation_mode(item);
      if (!m) throw pretouch::Error(pretouch::ErrorCode::kConfigError, "unknown mode: " + item);
      options.modes.push_back(*m);
    }
  }
  const pretouch::ExperimentConfig params = load_or_default(config_path);
  std::signal(SIGINT, on_sigint);
  const pretouch::ExperimentRun run = pretouch::run_experiment(params, options);
  pretouch::write_summary_csv(std::cout, run.summary);
  pretouch::write_significance_csv(std::cout, run.summary);
  if (!run.summary.complete) {
    std::cerr << "experiment interrupted after " << run.results.size() << " trials\n";
    return kExitIncomplete;
  }
  return kExitOk;
}

int raycast_debug_cmd(const std::string& config_path, const std::string& joints_text, const std::string& object_text) {
  const pretouch::ExperimentConfig params = load_or_default(config_path);
  const std::vector<double> q = parse_list(joints_text);
  const std::vector<double> o = parse_list(object_text);
  if (q.size() != pretouch::kNumJoints || o.size() != 2) {
    throw pretouch::Error(pretouch::ErrorCode::kInvalidArgument, "expected 6 joint angles and an x,y object position");
  }
  pretouch::JointVector joints;
  std::copy(q.begin(), q.end(), joints.angles.begin());
  const pretouch::MeasurementVector z =
      pretouch::expected_measurements(joints, {o[0], o[1]}, params.world.object.radius, params.world.hand);
  for (int k = 0; k < pretouch::kNumBeams; ++k) {
    std::printf("beam %d (%s%d): %.3f\n", k, k < pretouch::kSensorsPerTip ? "L" : "R",
                k % pretouch::kSensorsPerTip, z[static_cast<std::size_t>(k)]);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pretouch two-finger pushing simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";

  auto* trial = app.add_subcommand("run-trial", "Run one trial");
  std::string mode = "proximity";
  std::uint64_t seed = 0;
  trial->add_option("--mode", mode, "fiducial, proximity or tactile")->required();
  trial->add_option("--seed", seed);
  trial->add_option("--config", config_path);
  trial->add_option("--out", out_dir);

  auto* experiment = app.add_subcommand("run-experiment", "Run repeated trials per mode");
  int trials = 10;
  std::string modes = "all";
  std::uint64_t base_seed = 0;
  experiment->add_option("--trials", trials);
  experiment->add_option("--modes", modes, "all or a comma separated list");
  experiment->add_option("--base-seed", base_seed);
  experiment->add_option("--config", config_path);
  experiment->add_option("--out", out_dir);

  auto* raycast = app.add_subcommand("raycast-debug", "Print the expected beam readings");
  std::string joints_text;
  std::string object_text;
  raycast->add_option("--config", config_path);
  raycast->add_option("--joints", joints_text, "six joint angles in radians")->required();
  raycast->add_option("--object", object_text, "object center x,y in mm")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*trial) return run_trial_cmd(mode, seed, config_path, out_dir);
    if (*experiment) return run_experiment_cmd(trials, modes, base_seed, config_path, out_dir);
    if (*raycast) return raycast_debug_cmd(config_path, joints_text, object_text);
  } catch (const pretouch::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
