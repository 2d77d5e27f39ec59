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

#ifndef CPS_GAME_HPP_
#define CPS_GAME_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cps/benefit.hpp"

namespace cps {

// One instance of the content production and sharing game: N homogeneous
// peers with benefit f and linear costs of production (kappa), download
// (delta) and upload (sigma).
struct CpsParams {
  int n_peers = 1;
  BenefitSpec benefit;
  double kappa = 0.0;
  double delta = 0.0;
  double sigma = 0.0;

  // Same costs and benefit with a different number of peers.
  CpsParams with_peers(int n) const;
};

// Throws PreconditionError unless N >= 1, all costs positive,
// kappa > delta + sigma and f'(0) > kappa.
void validate(const CpsParams& params);

// Dense row-major N x N matrix; z(i, j) is what peer i downloads from j.
class TransferMatrix {
 public:
  TransferMatrix() = default;
  explicit TransferMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * n_ + j];
  }

  // d_i: row sum.
  double download(std::size_t i) const;
  // u_i: column sum.
  double upload(std::size_t i) const;
  // w(Z): sum of all entries.
  double volume() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

struct Allocation {
  std::vector<double> x;  // production
  std::vector<double> y;  // sharing
  TransferMatrix z;       // downloads

  std::size_t size() const { return x.size(); }
};

inline constexpr double kFeasibilityTolerance = 1e-9;

// Throws PreconditionError naming the first violated constraint among
// x >= 0, 0 <= y <= x, z_ii = 0, 0 <= z_ij <= y_j.
void check_feasible(const Allocation& alloc);

enum class SolutionConcept { kSE, kPE, kEnforcedLevels, kFullSharing };

const char* to_string(SolutionConcept label);

struct SolutionReport {
  Allocation allocation;
  std::vector<double> utilities;
  double total_utility = 0.0;
  double transfer_volume = 0.0;
  SolutionConcept label = SolutionConcept::kSE;
};

// PoNS is +inf when enforced full sharing yields no production.
struct InefficiencyMetrics {
  double poa = 1.0;
  double pons = 1.0;
  double pou = 1.0;
};

// Per-capita marginal cost of content when n peers share everything.
double beta_tilde(const CpsParams& params, int n);
// Effective marginal cost of production under enforced full sharing.
double gamma_tilde(const CpsParams& params, int n);

// v_i = f(x_i + d_i) - kappa x_i - delta d_i - sigma u_i.
double utility(const CpsParams& params, const Allocation& alloc,
               std::size_t peer);

// Builds the report for an allocation: utilities, total and w(Z).
SolutionReport make_report(const CpsParams& params, Allocation alloc,
                           SolutionConcept label);

// The allocation where peer i produces and shares x_i and every other peer
// downloads all of it.
Allocation full_sharing_allocation(std::span<const double> x);

SolutionReport solve_noncooperative(const CpsParams& params);

// Pareto efficient outcome with total production split by `split`. An empty
// split means equal shares.
SolutionReport solve_pareto(const CpsParams& params,
                            std::span<const double> split = {});

// Outcome when the designer fixes the sharing levels y_e. Requires
// x_kappa <= sum(y_e) <= x_delta.
SolutionReport solve_enforced_levels(const CpsParams& params,
                                     std::span<const double> y_e);

// Outcome when y_i = x_i is enforced but production is chosen freely.
SolutionReport solve_full_sharing(const CpsParams& params,
                                  std::span<const double> split = {});

InefficiencyMetrics inefficiency(const CpsParams& params);

// Validates a weight vector (nonnegative, size N, sums to 1 within 1e-12)
// or returns equal weights when `split` is empty.
std::vector<double> normalize_split(std::span<const double> split, int n);

}  // namespace cps

#endif  // CPS_GAME_HPP_
