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

#ifndef CPS_KERNELS_HPP_
#define CPS_KERNELS_HPP_

// Data-parallel inner loops. Each kernel has a serial reference in
// cps::kernels::serial and an OpenMP version in cps::kernels::omp with the
// same signature. Results are bit-identical except for the Shapley sums,
// which differ by summation order only; the tests hold them together
// and bench/ compares their speed.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "cps/coalitional.hpp"
#include "cps/game.hpp"

namespace cps::kernels {

// Every quantity plotted per network size in the numerical illustration.
struct SweepRow {
  int n = 0;
  // average individual utility
  double avg_cooperative = 0.0;     // f*(beta)
  double avg_noncooperative = 0.0;  // f*(kappa)
  double avg_full_sharing = 0.0;    // f(x~_gamma) - beta x~_gamma
  // total utility
  double pi_pe = 0.0;
  double pi_nc = 0.0;
  double pi_fs = 0.0;
  double mp = 0.0;
  double g = 0.0;
  InefficiencyMetrics metrics;
  // transfer volume w(Z)
  double w_pe = 0.0;
  double w_nc = 0.0;
  double w_fs = 0.0;
  double p_star = 0.0;
};

// A uniform grid of `points` values on [lo, hi].
struct GridAxis {
  double lo = 0.0;
  double hi = 1.0;
  int points = 2;

  double at(int k) const {
    return points == 1 ? lo : lo + (hi - lo) * k / (points - 1);
  }
};

struct GridMax {
  int ia = 0;
  int ib = 0;
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
};

using Objective2 = std::function<double(double, double)>;

namespace serial {

std::vector<SweepRow> sweep(const CpsParams& params, int n_min, int n_max);

// Maximizer of `objective` over the product grid; ties go to the smallest
// (ia, ib) in lexicographic order.
GridMax grid_argmax(const Objective2& objective, const GridAxis& a,
                    const GridAxis& b);

// Smallest coalition (by bitmask) with sum_{i in S} payoff_i < v(S) - tol,
// if any, over all 2^N - 1 nonempty coalitions.
std::optional<Coalition> first_blocking_coalition(const CoalitionValueFn& v,
                                                  std::span<const double> payoff,
                                                  double tol);

// Shapley value as the mean marginal contribution over all N! arrival
// orders.
std::vector<double> shapley_by_permutation(const CoalitionValueFn& v);

}  // namespace serial

namespace omp {

std::vector<SweepRow> sweep(const CpsParams& params, int n_min, int n_max);
GridMax grid_argmax(const Objective2& objective, const GridAxis& a,
                    const GridAxis& b);
std::optional<Coalition> first_blocking_coalition(const CoalitionValueFn& v,
                                                  std::span<const double> payoff,
                                                  double tol);
std::vector<double> shapley_by_permutation(const CoalitionValueFn& v);

}  // namespace omp

// Limits for the exhaustive kernels.
inline constexpr int kMaxExhaustivePeers = 20;
inline constexpr int kMaxPermutationPeers = 10;

// One row of the sweep; shared by both implementations.
SweepRow sweep_row(const CpsParams& params, int n);

}  // namespace cps::kernels

#endif  // CPS_KERNELS_HPP_
