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

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "pretouch/hand_model.hpp"
#include "pretouch/parallel.hpp"
#include "pretouch/sensor_sim.hpp"
#include "pretouch/vec2.hpp"

namespace pretouch {

// Hypothesis over the cylinder's planar position.
struct Particle {
  Vec2 position;
  double weight = 0.0;
};

struct ParticleSet {
  std::vector<Particle> particles;
  std::mt19937_64 rng;

  [[nodiscard]] std::size_t size() const { return particles.size(); }
  [[nodiscard]] double weight_sum() const;
};

struct BeamModelParams {
  double sigma = 5.0;
  double w1 = 0.95;
  double w2 = 0.05;
  double z_max = 255.0;
};

struct MotionNoiseParams {
  double sigma_motion = 1.0;
};

struct FilterParams {
  std::size_t num_particles = 1000;
  double init_spread = 3.0;
  double ess_threshold_fraction = 0.5;
  BeamModelParams beam;
  MotionNoiseParams motion;
};

void validate(const FilterParams& params);

// n draws from an isotropic Gaussian about `start`, weights 1/n.
[[nodiscard]] ParticleSet init_particles(const Vec2& start, double spread, std::size_t n, std::uint64_t seed);

// w1 N(z; z*, sigma^2) + w2 U(z; 0, z_max), without the normalizer.
[[nodiscard]] double beam_likelihood(double z, double z_star, const BeamModelParams& params);

// Everything the sensor model needs besides the particle itself.
struct ObservationContext {
  SensorFrames frames;
  SensorRange range;
  double object_radius = 0.0;
  SensingConfig mode;
};

[[nodiscard]] ObservationContext make_observation_context(const JointVector& joints, const HandParams& hand,
                                                          double object_radius, const SensingConfig& mode);

namespace kernels {

// Sum over `beams` of log beam_likelihood for every particle, written to
// `out`. The parallel and serial versions are bitwise identical.
void beam_log_likelihoods(std::span<const Particle> particles, const MeasurementVector& z,
                          const ObservationContext& ctx, const BeamModelParams& params,
                          std::span<const int> beams, std::span<double> out, Execution exec);

}  // namespace kernels

struct UpdateReport {
  bool degenerate = false;
  double effective_sample_size = 0.0;
};

// Multiplies each weight by the product of per-beam likelihoods over
// `beams`, in the log domain, and renormalizes. In tactile mode both the
// measurement and the expected measurement are truncated. When every weight
// underflows the set is reset to uniform and the report flags it.
UpdateReport measurement_update(ParticleSet& ps, const MeasurementVector& z, const ObservationContext& ctx,
                                const BeamModelParams& params, std::span<const int> beams,
                                Execution exec = Execution::kParallel);

// All eight beams.
UpdateReport measurement_update(ParticleSet& ps, const MeasurementVector& z, const JointVector& joints,
                                const HandParams& hand, double object_radius, const SensingConfig& mode,
                                const BeamModelParams& params, Execution exec = Execution::kParallel);

// Shifts every particle by `expected_delta` plus per-axis Gaussian noise.
void motion_update(ParticleSet& ps, const Vec2& expected_delta, const MotionNoiseParams& noise);

[[nodiscard]] double effective_sample_size(const ParticleSet& ps);

// Systematic resampling to uniform weights when ESS < fraction * N.
// Returns true when the set was resampled.
bool resample_if_needed(ParticleSet& ps, double ess_threshold_fraction);

struct Covariance2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;
};

struct Estimate {
  Vec2 mean;
  Covariance2 covariance;
};

[[nodiscard]] Estimate estimate(const ParticleSet& ps);

}  // namespace pretouch
