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
#include <numeric>

#include "cps/error.hpp"
#include "cps/incentives.hpp"
#include "cps/kernels.hpp"

namespace cps::kernels {

SweepRow sweep_row(const CpsParams& params, int n) {
  const CpsParams p = params.with_peers(n);
  SweepRow r;
  r.n = n;
  const double beta = beta_tilde(p, n);
  const double x_beta = maximizer(p.benefit, beta);
  const double x_fs = maximizer(p.benefit, gamma_tilde(p, n));
  r.avg_cooperative = conjugate(p.benefit, beta);
  r.avg_noncooperative = conjugate(p.benefit, p.kappa);
  r.avg_full_sharing = p.benefit.eval(x_fs) - beta * x_fs;
  r.pi_pe = n * r.avg_cooperative;
  r.pi_nc = n * r.avg_noncooperative;
  r.pi_fs = n * r.avg_full_sharing;
  r.g = r.avg_cooperative;
  r.mp = n == 1 ? r.g
                : r.pi_pe - (n - 1) * conjugate(p.benefit, beta_tilde(p, n - 1));
  r.metrics = inefficiency(p);
  r.w_pe = (n - 1) * x_beta;
  r.w_nc = 0.0;
  r.w_fs = (n - 1) * x_fs;
  r.p_star = optimal_price(p);
  return r;
}

namespace {

void check_range(int n_min, int n_max) {
  if (n_min < 1 || n_max < n_min) {
    throw PreconditionError("sweep: need 1 <= n_min <= n_max");
  }
}

}  // namespace

namespace serial {

std::vector<SweepRow> sweep(const CpsParams& params, int n_min, int n_max) {
  check_range(n_min, n_max);
  validate(params);
  std::vector<SweepRow> rows;
  rows.reserve(static_cast<std::size_t>(n_max - n_min + 1));
  for (int n = n_min; n <= n_max; ++n) rows.push_back(sweep_row(params, n));
  return rows;
}

GridMax grid_argmax(const Objective2& objective, const GridAxis& a,
                    const GridAxis& b) {
  GridMax best;
  bool have = false;
  for (int i = 0; i < a.points; ++i) {
    const double va = a.at(i);
    for (int j = 0; j < b.points; ++j) {
      const double vb = b.at(j);
      const double f = objective(va, vb);
      if (!have || f > best.value) {
        best = {i, j, va, vb, f};
        have = true;
      }
    }
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
  const std::uint64_t end = std::uint64_t{1} << n;
  for (std::uint64_t mask = 1; mask < end; ++mask) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      if ((mask >> i) & 1U) sum += payoff[static_cast<std::size_t>(i)];
    }
    if (sum < v(Coalition(mask)) - tol) return Coalition(mask);
  }
  return std::nullopt;
}

std::vector<double> shapley_by_permutation(const CoalitionValueFn& v) {
  const int n = v.n_peers;
  if (n < 1 || n > kMaxPermutationPeers) {
    throw PreconditionError("shapley_by_permutation: N out of range");
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> total(static_cast<std::size_t>(n), 0.0);
  double count = 0.0;
  do {
    Coalition s;
    double before = 0.0;
    for (int i : order) {
      s = s.with(i);
      const double after = v(s);
      total[static_cast<std::size_t>(i)] += after - before;
      before = after;
    }
    count += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& t : total) t /= count;
  return total;
}

}  // namespace serial
}  // namespace cps::kernels
