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

#include <span>
#include <vector>

namespace pretouch {

struct MannWhitneyResult {
  // U of the first sample: pairs (a_i, b_j) with a_i > b_j, ties counting 1/2.
  double u = 0.0;
  double p_value = 1.0;
  bool exact = false;
  // Both samples are the same constant; p is 1 by convention.
  bool degenerate = false;
};

// Exact sample sizes up to this pooled total; normal approximation above.
inline constexpr std::size_t kExactMannWhitneyLimit = 16;

// Two-sided Mann-Whitney U test using midranks for ties. Exact p-values come
// from enumerating every split of the pooled midranks; larger samples use the
// tie-corrected normal approximation with continuity correction.
[[nodiscard]] MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

// Midranks (1-based) of `values`.
[[nodiscard]] std::vector<double> midranks(std::span<const double> values);

[[nodiscard]] double mean(std::span<const double> values);

// Sample standard deviation (n - 1); zero for fewer than two values.
[[nodiscard]] double sample_std(std::span<const double> values);

}  // namespace pretouch
