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

#include <filesystem>
#include <string>

#include <json.hpp>

#include "pretouch/mppi_controller.hpp"
#include "pretouch/particle_filter.hpp"
#include "pretouch/sensor_sim.hpp"
#include "pretouch/world_sim.hpp"

namespace pretouch {

struct TrialParams {
  double timeout = 60.0;
  double success_radius = 1.0;
  double filter_rate_hz = 18.0;
  // Standard deviation of the per-axis jitter on fiducial estimates (mm).
  double fiducial_jitter = 0.5;
};

struct SensorParams {
  double sigma = 5.0;
  double outlier_rate = 0.01;
  double d_tact_max = 18.0;
};

// Every tunable constant of a trial, one block per module.
struct ExperimentConfig {
  WorldParams world;
  SensorParams sensor;
  FilterParams filter;
  MppiParams mppi;
  TrialParams trial;
};

// Throws Error(kConfigError) on any invariant violation.
void validate(const ExperimentConfig& config);

// Missing keys keep their defaults; unknown keys are rejected.
[[nodiscard]] ExperimentConfig config_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json config_to_json(const ExperimentConfig& config);

[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace pretouch
