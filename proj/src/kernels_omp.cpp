// Copyright 2026 The cpsgame Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <limits>
#include <numeric>

#include "cps/error.hpp"
#include "cps/kernels.hpp"

namespace cps::kernels::omp {

std::vector<SweepRow> sweep(const CpsParams& params, int n_min, int n_max) {
  if (n_min < 1 || n_max < n_min) {
    throw PreconditionError("sweep: need 1 <= n_min <= n_max");
  }
  validate(params);
  const int count = n_max - n_min + 1;
  std::vector<SweepRow> rows(static_cast<std::size_t>(count));
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < count; ++k) {
    try {
      rows[static_cast<std::size_t>(k)] = sweep_row(params, n_min + k);
    } catch (...) {
#pragma omp critical(cps_sweep_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return rows;
}

GridMax grid_argmax(const Objective2& objective, const GridAxis& a,
                    const GridAxis& b) {
  std::vector<GridMax> row_best(static_cast<std::size_t>(a.points));
#pragma omp parallel for schedule(static)
  for (int i = 0; i < a.points; ++i) {
    const double va = a.at(i);
    GridMax best{i, 0, va, b.at(0), objective(va, b.at(0))};
    for (int j = 1; j < b.points; ++j) {
      const double vb = b.at(j);
      const double f = objective(va, vb);
      if (f > best.value) best = {i, j, va, vb, f};
    }
    row_best[static_cast<std::size_t>(i)] = best;
  }
  GridMax best = row_best.front();
  for (std::size_t i = 1; i < row_best.size(); ++i) {
    if (row_best[i].value > best.value) best = row_best[i];
  }
  return best;
}

std::optional<Coalition> first_blocking_coalition(const CoalitionValueFn& v,
                                                  std::span<const double> payoff,
                                                  double tol) {
  const int n = v.n_peers;
  if (n > kMaxExhaustivePeers || payoff.size() != static_cast<std::size_t>(n)) {
    throw PreconditionError("first_blocking_coalition: bad size");
  }
  const auto end = static_cast<std::int64_t>(std::uint64_t{1} << n);
  std::int64_t found = std::numeric_limits<std::int64_t>::max();
#pragma omp parallel for schedule(static) reduction(min : found)
  for (std::int64_t mask = 1; mask < end; ++mask) {
    if (mask >= found) continue;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      if ((mask >> i) & 1) sum += payoff[static_cast<std::size_t>(i)];
    }
    if (sum < v(Coalition(static_cast<std::uint64_t>(mask))) - tol) {
      found = mask;
    }
  }
  if (found == std::numeric_limits<std::int64_t>::max()) return std::nullopt;
  return Coalition(static_cast<std::uint64_t>(found));
}

std::vector<double> shapley_by_permutation(const CoalitionValueFn& v) {
  const int n = v.n_peers;
  if (n < 1 || n > kMaxPermutationPeers) {
    throw PreconditionError("shapley_by_permutation: N out of range");
  }
  const auto un = static_cast<std::size_t>(n);
  // One chunk per first arrival; chunks are summed in a fixed order.
  std::vector<std::vector<double>> chunk(un, std::vector<double>(un, 0.0));
  std::vector<double> chunk_count(un, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (int first = 0; first < n; ++first) {
    std::vector<int> rest;
    for (int i = 0; i < n; ++i) {
      if (i != first) rest.push_back(i);
    }
    auto& acc = chunk[static_cast<std::size_t>(first)];
    const double v_first = v(Coalition().with(first));
    do {
      acc[static_cast<std::size_t>(first)] += v_first;
      Coalition s = Coalition().with(first);
      double before = v_first;
      for (int i : rest) {
        s = s.with(i);
        const double after = v(s);
        acc[static_cast<std::size_t>(i)] += after - before;
        before = after;
      }
      chunk_count[static_cast<std::size_t>(first)] += 1.0;
    } while (std::next_permutation(rest.begin(), rest.end()));
  }
  std::vector<double> total(un, 0.0);
  double count = 0.0;
  for (std::size_t c = 0; c < un; ++c) {
    for (std::size_t i = 0; i < un; ++i) total[i] += chunk[c][i];
    count += chunk_count[c];
  }
  for (double& t : total) t /= count;
  return total;
}

}  // namespace cps::kernels::omp
