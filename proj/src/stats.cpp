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

#include "pretouch/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pretouch/error.hpp"

namespace pretouch {

std::vector<double> midranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

namespace {

double exact_two_sided_p(std::span<const double> pooled_ranks, std::size_t na, double u_obs) {
  const std::size_t n = pooled_ranks.size();
  const double offset = 0.5 * static_cast<double>(na * (na + 1));
  const double center = 0.5 * static_cast<double>(na * (n - na));
  const double observed = std::abs(u_obs - center);

  // Walk every na-subset of the pooled ranks via a selection mask.
  std::vector<bool> mask(n, false);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(na), true);
  std::size_t extreme = 0;
  std::size_t total = 0;
  do {
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i]) rank_sum += pooled_ranks[i];
    }
    if (std::abs(rank_sum - offset - center) >= observed - 1e-9) ++extreme;
    ++total;
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return static_cast<double>(extreme) / static_cast<double>(total);
}

}  // namespace

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::kInvalidArgument, "mann_whitney_u needs nonempty samples");
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  const std::size_t n = na + nb;

  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());

  MannWhitneyResult res;
  const double center = 0.5 * static_cast<double>(na * nb);
  if (std::all_of(pooled.begin(), pooled.end(), [&](double v) { return v == pooled.front(); })) {
    res.u = center;
    res.p_value = 1.0;
    res.degenerate = true;
    res.exact = n <= kExactMannWhitneyLimit;
    return res;
  }

  const std::vector<double> ranks = midranks(pooled);
  const double rank_sum_a = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(na), 0.0);
  res.u = rank_sum_a - 0.5 * static_cast<double>(na * (na + 1));

  if (n <= kExactMannWhitneyLimit) {
    res.exact = true;
    res.p_value = exact_two_sided_p(ranks, na, res.u);
    return res;
  }

  // Tie correction: sum of (t^3 - t) over groups of tied values.
  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  const double nn = static_cast<double>(n);
  const double variance =
      static_cast<double>(na * nb) / 12.0 * ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
  const double z = std::max(0.0, std::abs(res.u - center) - 0.5) / std::sqrt(variance);
  res.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return res;
}

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace pretouch
