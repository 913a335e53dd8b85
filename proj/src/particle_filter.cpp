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

#include "pretouch/particle_filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "pretouch/error.hpp"

namespace pretouch {

namespace {

constexpr std::array<int, kNumBeams> kAllBeams = {0, 1, 2, 3, 4, 5, 6, 7};

double log_beam_likelihood(double z, double z_star, const BeamModelParams& params) {
  return std::log(beam_likelihood(z, z_star, params));
}

double particle_log_likelihood(const Vec2& position, const MeasurementVector& z, const ObservationContext& ctx,
                               const BeamModelParams& params, std::span<const int> beams) {
  const bool tactile = ctx.mode.mode == SensingMode::kTactile;
  double sum = 0.0;
  for (int j : beams) {
    double z_star = raycast_cylinder(ctx.frames[j], position, ctx.object_radius, ctx.range);
    if (tactile) z_star = std::min(z_star, ctx.mode.d_tact_max);
    sum += log_beam_likelihood(z[j], z_star, params);
  }
  return sum;
}

void reset_uniform(ParticleSet& ps) {
  const double w = 1.0 / static_cast<double>(ps.size());
  for (Particle& p : ps.particles) p.weight = w;
}

}  // namespace

double ParticleSet::weight_sum() const {
  return std::accumulate(particles.begin(), particles.end(), 0.0,
                         [](double acc, const Particle& p) { return acc + p.weight; });
}

void validate(const FilterParams& params) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfigError, "filter: " + what); };
  if (params.num_particles < 1) fail("num_particles must be >= 1");
  if (!(params.init_spread >= 0.0)) fail("init_spread must be >= 0");
  if (!(params.beam.sigma > 0.0)) fail("beam sigma must be positive");
  if (!(params.beam.w1 >= 0.0 && params.beam.w2 >= 0.0) ||
      std::abs(params.beam.w1 + params.beam.w2 - 1.0) > 1e-12) {
    fail("beam mixture weights must be nonnegative and sum to 1");
  }
  if (!(params.beam.z_max > 0.0)) fail("z_max must be positive");
  if (!(params.motion.sigma_motion >= 0.0)) fail("sigma_motion must be >= 0");
  if (!(params.ess_threshold_fraction >= 0.0 && params.ess_threshold_fraction <= 1.0)) {
    fail("ess_threshold_fraction must be in [0, 1]");
  }
}

ParticleSet init_particles(const Vec2& start, double spread, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "init_particles needs n >= 1");
  ParticleSet ps{{}, std::mt19937_64(seed)};
  ps.particles.resize(n);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double w = 1.0 / static_cast<double>(n);
  for (Particle& p : ps.particles) {
    const double dx = gauss(ps.rng);
    const double dy = gauss(ps.rng);
    p = {start + Vec2{dx, dy} * spread, w};
  }
  return ps;
}

double beam_likelihood(double z, double z_star, const BeamModelParams& params) {
  const double r = (z - z_star) / params.sigma;
  const double gaussian = std::exp(-0.5 * r * r) / (params.sigma * std::sqrt(2.0 * std::numbers::pi));
  const double uniform = (z >= 0.0 && z <= params.z_max) ? 1.0 / params.z_max : 0.0;
  return params.w1 * gaussian + params.w2 * uniform;
}

ObservationContext make_observation_context(const JointVector& joints, const HandParams& hand,
                                            double object_radius, const SensingConfig& mode) {
  return {sensor_frames(joints, hand), sensor_range(hand), object_radius, mode};
}

namespace kernels {

void beam_log_likelihoods(std::span<const Particle> particles, const MeasurementVector& z,
                          const ObservationContext& ctx, const BeamModelParams& params,
                          std::span<const int> beams, std::span<double> out, Execution exec) {
  const auto n = static_cast<std::ptrdiff_t>(particles.size());
  if (exec == Execution::kParallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      out[i] = particle_log_likelihood(particles[i].position, z, ctx, params, beams);
    }
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      out[i] = particle_log_likelihood(particles[i].position, z, ctx, params, beams);
    }
  }
}

}  // namespace kernels

UpdateReport measurement_update(ParticleSet& ps, const MeasurementVector& z, const ObservationContext& ctx,
                                const BeamModelParams& params, std::span<const int> beams, Execution exec) {
  const MeasurementVector observed = apply_sensing_mode(z, ctx.mode);
  std::vector<double> log_w(ps.size());
  kernels::beam_log_likelihoods(ps.particles, observed, ctx, params, beams, log_w, exec);

  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double w = ps.particles[i].weight;
    log_w[i] = w > 0.0 ? std::log(w) + log_w[i] : -std::numeric_limits<double>::infinity();
    if (log_w[i] > best) best = log_w[i];
  }

  UpdateReport report;
  if (!std::isfinite(best)) {
    reset_uniform(ps);
    report.degenerate = true;
    report.effective_sample_size = static_cast<double>(ps.size());
    return report;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double w = std::exp(log_w[i] - best);
    ps.particles[i].weight = w;
    sum += w;
  }
  for (Particle& p : ps.particles) p.weight /= sum;
  report.effective_sample_size = effective_sample_size(ps);
  return report;
}

UpdateReport measurement_update(ParticleSet& ps, const MeasurementVector& z, const JointVector& joints,
                                const HandParams& hand, double object_radius, const SensingConfig& mode,
                                const BeamModelParams& params, Execution exec) {
  return measurement_update(ps, z, make_observation_context(joints, hand, object_radius, mode), params,
                            kAllBeams, exec);
}

void motion_update(ParticleSet& ps, const Vec2& expected_delta, const MotionNoiseParams& noise) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Particle& p : ps.particles) {
    const double dx = gauss(ps.rng);
    const double dy = gauss(ps.rng);
    p.position += expected_delta + Vec2{dx, dy} * noise.sigma_motion;
  }
}

double effective_sample_size(const ParticleSet& ps) {
  double sq = 0.0;
  for (const Particle& p : ps.particles) sq += p.weight * p.weight;
  return sq > 0.0 ? 1.0 / sq : 0.0;
}

bool resample_if_needed(ParticleSet& ps, double ess_threshold_fraction) {
  const std::size_t n = ps.size();
  if (effective_sample_size(ps) >= ess_threshold_fraction * static_cast<double>(n)) return false;

  std::vector<double> cumulative(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += ps.particles[i].weight;
    cumulative[i] = acc;
  }
  for (double& c : cumulative) c /= acc;

  const double step = 1.0 / static_cast<double>(n);
  const double u0 = std::uniform_real_distribution<double>(0.0, step)(ps.rng);
  std::vector<Particle> out(n);
  std::size_t i = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double u = u0 + static_cast<double>(k) * step;
    while (i + 1 < n && u > cumulative[i]) ++i;
    out[k] = {ps.particles[i].position, step};
  }
  ps.particles = std::move(out);
  return true;
}

Estimate estimate(const ParticleSet& ps) {
  Estimate est;
  double total = 0.0;
  for (const Particle& p : ps.particles) {
    est.mean += p.position * p.weight;
    total += p.weight;
  }
  est.mean *= 1.0 / total;
  for (const Particle& p : ps.particles) {
    const Vec2 d = p.position - est.mean;
    est.covariance.xx += p.weight * d.x * d.x;
    est.covariance.xy += p.weight * d.x * d.y;
    est.covariance.yy += p.weight * d.y * d.y;
  }
  est.covariance.xx /= total;
  est.covariance.xy /= total;
  est.covariance.yy /= total;
  return est;
}

}  // namespace pretouch
