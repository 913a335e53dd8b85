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

#include "pretouch/config.hpp"

#include <fstream>
#include <set>

#include "pretouch/error.hpp"

namespace pretouch {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::kConfigError, what); }

// Reads optional fields out of one config block and rejects leftovers.
class Block {
 public:
  Block(const json& root, const std::string& name) : name_(name) {
    if (!root.contains(name)) return;
    node_ = &root.at(name);
    if (!node_->is_object()) config_error("block '" + name + "' must be an object");
  }

  ~Block() = default;

  template <typename T>
  void read(const std::string& key, T& out) {
    seen_.insert(key);
    if (node_ == nullptr || !node_->contains(key)) return;
    try {
      out = node_->at(key).get<T>();
    } catch (const json::exception& e) {
      config_error(name_ + "." + key + ": " + e.what());
    }
  }

  void read_vec(const std::string& key, Vec2& out) {
    std::array<double, 2> v = {out.x, out.y};
    read(key, v);
    out = {v[0], v[1]};
  }

  void read_deg(const std::string& key, double& radians) {
    double deg = radians * 180.0 / std::numbers::pi;
    read(key, deg);
    radians = deg_to_rad(deg);
  }

  void finish() const {
    if (node_ == nullptr) return;
    for (const auto& [key, _] : node_->items()) {
      if (!seen_.contains(key)) config_error("unknown key " + name_ + "." + key);
    }
  }

 private:
  std::string name_;
  const json* node_ = nullptr;
  std::set<std::string> seen_;
};

GoalDistanceMetric parse_metric(const std::string& s) {
  if (s == "euclidean") return GoalDistanceMetric::kEuclidean;
  if (s == "horizontal") return GoalDistanceMetric::kHorizontal;
  config_error("mppi.goal_distance must be 'euclidean' or 'horizontal'");
}

}  // namespace

void validate(const ExperimentConfig& config) {
  validate(config.world);
  validate(config.filter);
  validate(config.mppi);
  const auto& s = config.sensor;
  if (!(s.sigma >= 0.0)) config_error("sensor.sigma must be >= 0");
  if (!(s.outlier_rate >= 0.0 && s.outlier_rate < 1.0)) config_error("sensor.outlier_rate must be in [0, 1)");
  if (!(s.d_tact_max > 0.0)) config_error("sensor.d_tact_max must be positive");
  const auto& t = config.trial;
  if (!(t.timeout > 0.0)) config_error("trial.timeout must be positive");
  if (!(t.success_radius > 0.0)) config_error("trial.success_radius must be positive");
  if (!(t.filter_rate_hz > 0.0)) config_error("trial.filter_rate_hz must be positive");
  if (!(t.fiducial_jitter >= 0.0)) config_error("trial.fiducial_jitter must be >= 0");
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) config_error("config root must be an object");
  for (const auto& [key, _] : j.items()) {
    static const std::set<std::string> kBlocks = {"hand", "world", "sensor", "filter", "mppi", "trial"};
    if (!kBlocks.contains(key)) config_error("unknown block '" + key + "'");
  }

  ExperimentConfig c;
  {
    HandParams& h = c.world.hand;
    Block b(j, "hand");
    b.read("link_lengths", h.link_lengths);
    std::array<std::array<double, 2>, kNumFingers> bases = {
        {{h.base_positions[0].x, h.base_positions[0].y}, {h.base_positions[1].x, h.base_positions[1].y}}};
    b.read("base_positions", bases);
    for (int f = 0; f < kNumFingers; ++f) h.base_positions[f] = {bases[f][0], bases[f][1]};
    std::array<double, kNumFingers> orient_deg = {h.base_orientations[0] * 180.0 / std::numbers::pi,
                                                  h.base_orientations[1] * 180.0 / std::numbers::pi};
    b.read("base_orientations_deg", orient_deg);
    for (int f = 0; f < kNumFingers; ++f) h.base_orientations[f] = deg_to_rad(orient_deg[f]);
    b.read("fingertip_arc_radius", h.fingertip_arc_radius);
    b.read("sensor_count_per_tip", h.sensor_count_per_tip);
    b.read_deg("sensor_angular_spacing_deg", h.sensor_angular_spacing);
    b.read("sensor_range_min", h.sensor_range_min);
    b.read("sensor_range_max", h.sensor_range_max);
    b.read("surface_offset", h.surface_offset);
    b.read_deg("joint_limit_low_deg", h.joint_limit_low);
    b.read_deg("joint_limit_high_deg", h.joint_limit_high);
    b.finish();
  }
  {
    Block b(j, "world");
    b.read("object_radius", c.world.object.radius);
    b.read_vec("start_position", c.world.object.start_position);
    b.read_vec("goal_position", c.world.object.goal_position);
    SimParams& s = c.world.sim;
    b.read("dt", s.dt);
    b.read("joint_rate_limit", s.joint_rate_limit);
    b.read("contact_tolerance", s.contact_tolerance);
    b.read("penetration_tolerance", s.penetration_tolerance);
    b.read("projection_iterations", s.projection_iterations);
    b.read("projection_tolerance", s.projection_tolerance);
    b.read("substep_angle", s.substep_angle);
    b.read("palm_enabled", s.palm_enabled);
    b.read("palm_height", s.palm_height);
    b.read("preset_flexion", s.preset_flexion.angles);
    b.finish();
  }
  {
    Block b(j, "sensor");
    b.read("sigma", c.sensor.sigma);
    b.read("outlier_rate", c.sensor.outlier_rate);
    b.read("d_tact_max", c.sensor.d_tact_max);
    b.finish();
  }
  {
    Block b(j, "filter");
    FilterParams& f = c.filter;
    b.read("num_particles", f.num_particles);
    b.read("init_spread", f.init_spread);
    b.read("ess_threshold_fraction", f.ess_threshold_fraction);
    b.read("sigma", f.beam.sigma);
    b.read("w1", f.beam.w1);
    b.read("w2", f.beam.w2);
    b.read("z_max", f.beam.z_max);
    b.read("sigma_motion", f.motion.sigma_motion);
    b.finish();
  }
  {
    Block b(j, "mppi");
    MppiParams& m = c.mppi;
    b.read("num_rollouts", m.num_rollouts);
    b.read("horizon", m.horizon);
    b.read("lambda", m.lambda);
    b.read("a1", m.a1);
    b.read("a2", m.a2);
    b.read("phi", m.phi);
    b.read("motor_noise_sigma", m.motor_noise_sigma);
    b.read("hold_sample", m.hold_sample);
    b.read("distance_scale", m.distance_scale);
    std::string metric = m.goal_distance == GoalDistanceMetric::kHorizontal ? "horizontal" : "euclidean";
    b.read("goal_distance", metric);
    m.goal_distance = parse_metric(metric);
    b.finish();
  }
  {
    Block b(j, "trial");
    b.read("timeout", c.trial.timeout);
    b.read("success_radius", c.trial.success_radius);
    b.read("filter_rate_hz", c.trial.filter_rate_hz);
    b.read("fiducial_jitter", c.trial.fiducial_jitter);
    b.finish();
  }
  validate(c);
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  const HandParams& h = c.world.hand;
  const SimParams& s = c.world.sim;
  auto vec = [](const Vec2& v) { return json::array({v.x, v.y}); };
  auto deg = [](double rad) { return rad * 180.0 / std::numbers::pi; };
  json j;
  j["hand"] = {
      {"link_lengths", h.link_lengths},
      {"base_positions", json::array({vec(h.base_positions[0]), vec(h.base_positions[1])})},
      {"base_orientations_deg", json::array({deg(h.base_orientations[0]), deg(h.base_orientations[1])})},
      {"fingertip_arc_radius", h.fingertip_arc_radius},
      {"sensor_count_per_tip", h.sensor_count_per_tip},
      {"sensor_angular_spacing_deg", deg(h.sensor_angular_spacing)},
      {"sensor_range_min", h.sensor_range_min},
      {"sensor_range_max", h.sensor_range_max},
      {"surface_offset", h.surface_offset},
      {"joint_limit_low_deg", deg(h.joint_limit_low)},
      {"joint_limit_high_deg", deg(h.joint_limit_high)},
  };
  j["world"] = {
      {"object_radius", c.world.object.radius},
      {"start_position", vec(c.world.object.start_position)},
      {"goal_position", vec(c.world.object.goal_position)},
      {"dt", s.dt},
      {"joint_rate_limit", s.joint_rate_limit},
      {"contact_tolerance", s.contact_tolerance},
      {"penetration_tolerance", s.penetration_tolerance},
      {"projection_iterations", s.projection_iterations},
      {"projection_tolerance", s.projection_tolerance},
      {"substep_angle", s.substep_angle},
      {"palm_enabled", s.palm_enabled},
      {"palm_height", s.palm_height},
      {"preset_flexion", s.preset_flexion.angles},
  };
  j["sensor"] = {{"sigma", c.sensor.sigma}, {"outlier_rate", c.sensor.outlier_rate}, {"d_tact_max", c.sensor.d_tact_max}};
  j["filter"] = {
      {"num_particles", c.filter.num_particles},
      {"init_spread", c.filter.init_spread},
      {"ess_threshold_fraction", c.filter.ess_threshold_fraction},
      {"sigma", c.filter.beam.sigma},
      {"w1", c.filter.beam.w1},
      {"w2", c.filter.beam.w2},
      {"z_max", c.filter.beam.z_max},
      {"sigma_motion", c.filter.motion.sigma_motion},
  };
  j["mppi"] = {
      {"num_rollouts", c.mppi.num_rollouts},
      {"horizon", c.mppi.horizon},
      {"lambda", c.mppi.lambda},
      {"a1", c.mppi.a1},
      {"a2", c.mppi.a2},
      {"phi", c.mppi.phi},
      {"motor_noise_sigma", c.mppi.motor_noise_sigma},
      {"hold_sample", c.mppi.hold_sample},
      {"distance_scale", c.mppi.distance_scale},
      {"goal_distance", c.mppi.goal_distance == GoalDistanceMetric::kHorizontal ? "horizontal" : "euclidean"},
  };
  j["trial"] = {
      {"timeout", c.trial.timeout},
      {"success_radius", c.trial.success_radius},
      {"filter_rate_hz", c.trial.filter_rate_hz},
      {"fiducial_jitter", c.trial.fiducial_jitter},
  };
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    config_error("cannot parse " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace pretouch
