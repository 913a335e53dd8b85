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

#include "pretouch/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <random>

#include <json.hpp>

#include "pretouch/error.hpp"
#include "pretouch/mppi_controller.hpp"
#include "pretouch/particle_filter.hpp"
#include "pretouch/sensor_sim.hpp"

namespace pretouch {

namespace {

enum Stream : std::uint64_t { kSensorStream = 1, kFilterStream = 2, kControllerStream = 3, kFiducialStream = 4 };

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

nlohmann::json vec_json(const Vec2& v) { return nlohmann::json::array({v.x, v.y}); }

}  // namespace

std::string_view to_string(EstimationMode mode) {
  switch (mode) {
    case EstimationMode::kFiducial:
      return "fiducial";
    case EstimationMode::kProximity:
      return "proximity";
    case EstimationMode::kTactile:
      return "tactile";
  }
  return "unknown";
}

std::optional<EstimationMode> parse_estimation_mode(std::string_view s) {
  for (EstimationMode m : kAllModes) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined key
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

TrialResult run_trial(const TrialConfig& cfg, std::ostream* trace, Execution exec) {
  const ExperimentConfig& p = cfg.params;
  validate(p);
  const WorldParams& world = p.world;
  const double dt = world.sim.dt;
  const bool filtered = cfg.mode != EstimationMode::kFiducial;
  const SensingConfig sensing{cfg.mode == EstimationMode::kTactile ? SensingMode::kTactile : SensingMode::kProximity,
                              p.sensor.d_tact_max};

  WorldState state;
  try {
    state = preset_contact_pose(world);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigError, std::string("unreachable preset pose: ") + e.what());
  }

  MeasurementSimulator sensor({p.sensor.sigma, p.sensor.outlier_rate, derive_seed(cfg.seed, kSensorStream)});
  ParticleSet particles = init_particles(world.object.start_position, p.filter.init_spread, p.filter.num_particles,
                                         derive_seed(cfg.seed, kFilterStream));
  MppiController controller(world, p.mppi, derive_seed(cfg.seed, kControllerStream));
  std::mt19937_64 fiducial_rng(derive_seed(cfg.seed, kFiducialStream));
  std::normal_distribution<double> gauss(0.0, 1.0);

  TrialResult result;
  result.mode = cfg.mode;
  result.seed = cfg.seed;
  result.tactile_truncation_verified = cfg.mode == EstimationMode::kTactile;

  const double filter_period = 1.0 / p.trial.filter_rate_hz;
  const int max_ticks = static_cast<int>(std::llround(p.trial.timeout / dt));
  long filter_tick = 0;
  MeasurementVector last_z{};
  UpdateReport last_report{false, static_cast<double>(particles.size())};
  Vec2 previous_estimate = world.object.start_position;
  double error_sum = 0.0;

  for (int tick = 0;; ++tick) {
    const double t = tick * dt;

    // Filter sub-ticks that fall at or before this control tick.
    if (filtered) {
      while (filter_tick * filter_period <= t + 1e-9) {
        last_z = sensor.simulate(state.joints, state.object_position, world.object.radius, world.hand, sensing);
        const ObservationContext ctx =
            make_observation_context(state.joints, world.hand, world.object.radius, sensing);
        if (sensing.mode == SensingMode::kTactile) {
          const bool generative = std::all_of(last_z.begin(), last_z.end(),
                                              [&](double v) { return v <= sensing.d_tact_max; });
          const bool expected = ctx.mode.mode == SensingMode::kTactile;
          result.tactile_truncation_verified = result.tactile_truncation_verified && generative && expected;
        }
        static constexpr std::array<int, kNumBeams> kBeams = {0, 1, 2, 3, 4, 5, 6, 7};
        last_report = measurement_update(particles, last_z, ctx, p.filter.beam, kBeams, exec);
        result.max_weight_sum_error = std::max(result.max_weight_sum_error, std::abs(particles.weight_sum() - 1.0));
        ++result.filter_updates;
        if (last_report.degenerate) {
          ++result.degenerate_events;
          if (result.diagnostic.empty()) {
            result.diagnostic = "DEGENERATE_WEIGHTS at t=" + format_number(filter_tick * filter_period);
          }
        }
        resample_if_needed(particles, p.filter.ess_threshold_fraction);
        ++filter_tick;
      }
    }

    Estimate est;
    if (filtered) {
      est = estimate(particles);
    } else {
      const double jx = gauss(fiducial_rng);
      const double jy = gauss(fiducial_rng);
      est.mean = state.object_position + Vec2{jx, jy} * p.trial.fiducial_jitter;
    }
    const double pose_error = distance(est.mean, state.object_position);
    result.pose_error_trace.push_back({t, pose_error});
    error_sum += pose_error;

    const double horizontal = horizontal_goal_distance(state.object_position, world.object);
    const bool reached = horizontal < p.trial.success_radius;
    const bool done = reached || tick >= max_ticks || result.degenerate_events > 0;

    nlohmann::json record;
    if (trace != nullptr) {
      record = {{"t", t},
                {"state", {{"joints", state.joints.angles}, {"object", vec_json(state.object_position)}}},
                {"estimate", vec_json(est.mean)},
                {"covariance", {est.covariance.xx, est.covariance.xy, est.covariance.yy}},
                {"ess", filtered ? last_report.effective_sample_size : 0.0},
                {"pose_error", pose_error},
                {"goal_distance", horizontal},
                {"measurements", filtered ? nlohmann::json(last_z) : nlohmann::json::array()}};
    }

    if (done) {
      result.success = reached && result.degenerate_events == 0;
      result.ticks = tick;
      result.exec_time = t;
      result.final_horizontal_distance = horizontal;
      result.final_goal_distance = distance(state.object_position, world.object.goal_position);
      result.avg_pose_error = error_sum / static_cast<double>(result.pose_error_trace.size());
      if (trace != nullptr) {
        record["done"] = true;
        record["success"] = result.success;
        *trace << record.dump() << '\n';
      }
      break;
    }

    // Plan on measured joints and the estimated object.
    WorldState planning = state;
    planning.object_position = est.mean;
    planning.object_velocity = tick == 0 ? Vec2{} : (est.mean - previous_estimate) * (1.0 / dt);
    previous_estimate = est.mean;
    const MppiController::Tick ctl = controller.compute(planning, exec);

    if (filtered) {
      const WorldState predicted = step(planning, ctl.action, world);
      motion_update(particles, predicted.object_position - planning.object_position, p.filter.motion);
    }
    state = step(state, ctl.action, world);

    if (trace != nullptr) {
      record["action"] = {{"motors", ctl.action.motor_commands}, {"brakes", ctl.action.brakes.label()}};
      record["costs"] = ctl.config_costs;
      record["switched"] = ctl.switched;
      *trace << record.dump() << '\n';
    }
  }
  return result;
}

ModeSummary summarize_mode(EstimationMode mode, std::span<const TrialResult> results) {
  ModeSummary s;
  s.mode = mode;
  std::vector<double> errors;
  std::vector<double> goal;
  std::vector<double> times;
  for (const TrialResult& r : results) {
    if (r.mode != mode) continue;
    ++s.trials;
    errors.push_back(r.avg_pose_error);
    if (r.success) {
      ++s.successes;
      goal.push_back(r.final_goal_distance);
      times.push_back(r.exec_time);
    }
  }
  s.avg_pose_error_mean = mean(errors);
  s.avg_pose_error_std = sample_std(errors);
  s.goal_distance_mean = mean(goal);
  s.goal_distance_std = sample_std(goal);
  s.exec_time_mean = mean(times);
  s.exec_time_std = sample_std(times);
  return s;
}

ExperimentSummary summarize(std::span<const TrialResult> results) {
  ExperimentSummary summary;
  for (EstimationMode m : kAllModes) {
    const bool present =
        std::any_of(results.begin(), results.end(), [&](const TrialResult& r) { return r.mode == m; });
    if (present) summary.modes.push_back(summarize_mode(m, results));
  }

  auto collect = [&](EstimationMode m, bool successes_only, auto field) {
    std::vector<double> v;
    for (const TrialResult& r : results) {
      if (r.mode == m && (!successes_only || r.success)) v.push_back(field(r));
    }
    return v;
  };
  auto add_test = [&](const std::string& metric, const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) return;
    summary.tests.push_back({metric, EstimationMode::kProximity, EstimationMode::kTactile, a.size(), b.size(),
                             mann_whitney_u(a, b)});
  };
  auto pose_error = [](const TrialResult& r) { return r.avg_pose_error; };
  auto goal_distance = [](const TrialResult& r) { return r.final_goal_distance; };
  add_test("avg_pose_error", collect(EstimationMode::kProximity, false, pose_error),
           collect(EstimationMode::kTactile, false, pose_error));
  add_test("final_goal_distance", collect(EstimationMode::kProximity, true, goal_distance),
           collect(EstimationMode::kTactile, true, goal_distance));
  return summary;
}

std::vector<PoseErrorTracePoint> pose_error_trace_export(std::span<const TrialResult> results, double dt) {
  std::vector<PoseErrorTracePoint> out;
  for (EstimationMode m : kAllModes) {
    // Bucket every sample onto the control grid.
    std::map<long, std::vector<double>> by_tick;
    for (const TrialResult& r : results) {
      if (r.mode != m) continue;
      for (const PoseErrorSample& s : r.pose_error_trace) by_tick[std::lround(s.time / dt)].push_back(s.error);
    }
    for (const auto& [tick, errors] : by_tick) {
      out.push_back({m, static_cast<double>(tick) * dt, mean(errors), sample_std(errors),
                     static_cast<int>(errors.size())});
    }
  }
  return out;
}

void write_trials_header(std::ostream& out) {
  out << "mode,seed,success,final_goal_distance_mm,final_horizontal_distance_mm,avg_pose_error_mm,exec_time_s,"
         "ticks,filter_updates,degenerate_events,diagnostic\n";
}

void write_trial_row(std::ostream& out, const TrialResult& r) {
  out << to_string(r.mode) << ',' << r.seed << ',' << (r.success ? 1 : 0) << ',' << format_number(r.final_goal_distance)
      << ',' << format_number(r.final_horizontal_distance) << ',' << format_number(r.avg_pose_error) << ','
      << format_number(r.exec_time) << ',' << r.ticks << ',' << r.filter_updates << ',' << r.degenerate_events << ','
      << r.diagnostic << '\n';
}

void write_summary_csv(std::ostream& out, const ExperimentSummary& summary) {
  out << "mode,trials,successes,avg_pose_error_mean_mm,avg_pose_error_std_mm,goal_dist_mean_mm,goal_dist_std_mm,"
         "exec_time_mean_s,exec_time_std_s\n";
  for (const ModeSummary& s : summary.modes) {
    out << to_string(s.mode) << ',' << s.trials << ',' << s.successes << ',' << format_number(s.avg_pose_error_mean)
        << ',' << format_number(s.avg_pose_error_std) << ',' << format_number(s.goal_distance_mean) << ','
        << format_number(s.goal_distance_std) << ',' << format_number(s.exec_time_mean) << ','
        << format_number(s.exec_time_std) << '\n';
  }
}

void write_significance_csv(std::ostream& out, const ExperimentSummary& summary) {
  out << "metric,mode_a,mode_b,n_a,n_b,u,p_value,exact\n";
  for (const SignificanceTest& t : summary.tests) {
    out << t.metric << ',' << to_string(t.a) << ',' << to_string(t.b) << ',' << t.n_a << ',' << t.n_b << ','
        << format_number(t.result.u) << ',' << format_number(t.result.p_value) << ',' << (t.result.exact ? 1 : 0)
        << '\n';
  }
}

void write_pose_error_trace_csv(std::ostream& out, std::span<const PoseErrorTracePoint> points) {
  out << "mode,time_s,mean_error_mm,std_error_mm,trials\n";
  for (const PoseErrorTracePoint& pt : points) {
    out << to_string(pt.mode) << ',' << format_number(pt.time) << ',' << format_number(pt.mean) << ','
        << format_number(pt.std) << ',' << pt.count << '\n';
  }
}

ExperimentRun run_experiment(const ExperimentConfig& params, const ExperimentOptions& options) {
  if (options.trials < 1) throw Error(ErrorCode::kInvalidArgument, "run_experiment needs at least one trial");
  validate(params);
  std::filesystem::create_directories(options.out_dir);

  ExperimentRun run;
  std::ofstream trials_csv(options.out_dir / "trials.csv");
  write_trials_header(trials_csv);

  bool interrupted = false;
  for (EstimationMode mode : options.modes) {
    for (int i = 0; i < options.trials && !interrupted; ++i) {
      if (options.interrupt != nullptr && options.interrupt->load()) {
        interrupted = true;
        break;
      }
      TrialConfig cfg{mode, options.base_seed + static_cast<std::uint64_t>(i), params};
      TrialResult r;
      if (options.write_traces) {
        std::ofstream trace(options.out_dir /
                            ("trace_" + std::string(to_string(mode)) + "_" + std::to_string(cfg.seed) + ".jsonl"));
        r = run_trial(cfg, &trace, options.exec);
      } else {
        r = run_trial(cfg, nullptr, options.exec);
      }
      write_trial_row(trials_csv, r);
      trials_csv.flush();
      run.results.push_back(std::move(r));
    }
  }

  run.summary = summarize(run.results);
  run.summary.complete = !interrupted;
  std::ofstream summary_csv(options.out_dir / "summary.csv");
  write_summary_csv(summary_csv, run.summary);
  std::ofstream significance_csv(options.out_dir / "significance.csv");
  write_significance_csv(significance_csv, run.summary);
  std::ofstream trace_csv(options.out_dir / "pose_error_trace.csv");
  write_pose_error_trace_csv(trace_csv, pose_error_trace_export(run.results, params.world.sim.dt));
  return run;
}

}  // namespace pretouch
