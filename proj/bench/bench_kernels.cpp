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

// Serial reference versus OpenMP for the two hot kernels.

#include <benchmark/benchmark.h>

#include <array>
#include <random>
#include <vector>

#include "pretouch/mppi_controller.hpp"
#include "pretouch/particle_filter.hpp"
#include "pretouch/world_sim.hpp"

namespace {

using namespace pretouch;

constexpr std::array<int, kNumBeams> kAllBeams = {0, 1, 2, 3, 4, 5, 6, 7};

void BM_BeamLogLikelihoods(benchmark::State& state, Execution exec) {
  const WorldParams world;
  const WorldState s = preset_contact_pose(world);
  const ParticleSet ps = init_particles(s.object_position, 5.0, static_cast<std::size_t>(state.range(0)), 1);
  const MeasurementVector z = expected_measurements(s.joints, s.object_position, world.object.radius, world.hand);
  const ObservationContext ctx = make_observation_context(s.joints, world.hand, world.object.radius, {});
  std::vector<double> out(ps.size());
  for (auto _ : state) {
    kernels::beam_log_likelihoods(ps.particles, z, ctx, BeamModelParams{}, kAllBeams, out, exec);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_RolloutBatch(benchmark::State& state, Execution exec) {
  const WorldParams world;
  const MppiParams params;
  const WorldState s = preset_contact_pose(world);
  const ControllerState ctrl = initial_controller_state(s.joints, params);
  std::mt19937_64 rng(2);
  const std::vector<ActionSequence> samples = sample_sequences(ctrl, params, world.hand, rng, &s.joints);
  for (auto _ : state) {
    std::vector<double> costs = rollout_batch(s, samples, world, params, exec);
    benchmark::DoNotOptimize(costs.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(samples.size()));
}

}  // namespace

BENCHMARK_CAPTURE(BM_BeamLogLikelihoods, serial, Execution::kSerial)->Arg(1000)->Arg(10000);
BENCHMARK_CAPTURE(BM_BeamLogLikelihoods, parallel, Execution::kParallel)->Arg(1000)->Arg(10000);
BENCHMARK_CAPTURE(BM_RolloutBatch, serial, Execution::kSerial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_RolloutBatch, parallel, Execution::kParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
