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

#include "cps/game.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "cps/error.hpp"

namespace cps {

CpsParams CpsParams::with_peers(int n) const {
  CpsParams p = *this;
  p.n_peers = n;
  return p;
}

void validate(const CpsParams& params) {
  std::ostringstream os;
  if (params.n_peers < 1) {
    os << "n_peers must be >= 1, got " << params.n_peers;
  } else if (!(params.kappa > 0.0) || !(params.delta > 0.0) ||
             !(params.sigma > 0.0)) {
    os << "costs must be positive (kappa=" << params.kappa
       << ", delta=" << params.delta << ", sigma=" << params.sigma << ")";
  } else if (!(params.kappa > params.delta + params.sigma)) {
    os << "kappa must exceed delta + sigma (" << params.kappa
       << " <= " << params.delta + params.sigma << ")";
  } else if (!params.benefit.deriv || !(params.benefit.deriv_at_zero >
                                        params.kappa)) {
    os << "f'(0) must exceed kappa (" << params.benefit.deriv_at_zero
       << " <= " << params.kappa << ")";
  }
  if (!os.str().empty()) throw PreconditionError(os.str());
}

double TransferMatrix::download(std::size_t i) const {
  double s = 0.0;
  for (std::size_t j = 0; j < n_; ++j) s += (*this)(i, j);
  return s;
}

double TransferMatrix::upload(std::size_t i) const {
  double s = 0.0;
  for (std::size_t j = 0; j < n_; ++j) s += (*this)(j, i);
  return s;
}

double TransferMatrix::volume() const {
  return std::accumulate(data_.begin(), data_.end(), 0.0);
}

void check_feasible(const Allocation& alloc) {
  const std::size_t n = alloc.x.size();
  const double tol = kFeasibilityTolerance;
  auto fail = [](const std::string& what) {
    throw PreconditionError("infeasible allocation: " + what);
  };
  if (alloc.y.size() != n || alloc.z.size() != n) {
    fail("x, y and z must all describe the same number of peers");
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::ostringstream os;
    if (!(alloc.x[i] >= -tol)) {
      os << "x[" << i << "] = " << alloc.x[i] << " < 0";
    } else if (!(alloc.y[i] >= -tol)) {
      os << "y[" << i << "] = " << alloc.y[i] << " < 0";
    } else if (alloc.y[i] > alloc.x[i] + tol) {
      os << "y[" << i << "] = " << alloc.y[i] << " > x[" << i
         << "] = " << alloc.x[i];
    } else if (std::abs(alloc.z(i, i)) > tol) {
      os << "z[" << i << "][" << i << "] = " << alloc.z(i, i) << " != 0";
    }
    if (!os.str().empty()) fail(os.str());
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (!(alloc.z(i, j) >= -tol)) {
        os << "z[" << i << "][" << j << "] = " << alloc.z(i, j) << " < 0";
      } else if (alloc.z(i, j) > alloc.y[j] + tol) {
        os << "z[" << i << "][" << j << "] = " << alloc.z(i, j) << " > y["
           << j << "] = " << alloc.y[j];
      }
      if (!os.str().empty()) fail(os.str());
    }
  }
}

const char* to_string(SolutionConcept label) {
  switch (label) {
    case SolutionConcept::kSE:
      return "SE";
    case SolutionConcept::kPE:
      return "PE";
    case SolutionConcept::kEnforcedLevels:
      return "EnforcedLevels";
    case SolutionConcept::kFullSharing:
      return "FullSharing";
  }
  return "?";
}

double beta_tilde(const CpsParams& params, int n) {
  const double nn = static_cast<double>(n);
  return params.kappa / nn + (nn - 1.0) * (params.delta + params.sigma) / nn;
}

double gamma_tilde(const CpsParams& params, int n) {
  return params.kappa + static_cast<double>(n - 1) * params.sigma;
}

namespace {

double utility_unchecked(const CpsParams& params, const Allocation& alloc,
                         std::size_t peer) {
  const double d = alloc.z.download(peer);
  const double u = alloc.z.upload(peer);
  const double x = alloc.x[peer];
  return params.benefit.eval(x + d) - params.kappa * x - params.delta * d -
         params.sigma * u;
}

}  // namespace

double utility(const CpsParams& params, const Allocation& alloc,
               std::size_t peer) {
  check_feasible(alloc);
  if (peer >= alloc.size()) {
    throw PreconditionError("utility: peer index out of range");
  }
  return utility_unchecked(params, alloc, peer);
}

SolutionReport make_report(const CpsParams& params, Allocation alloc,
                           SolutionConcept label) {
  check_feasible(alloc);
  SolutionReport r;
  r.utilities.resize(alloc.size());
  for (std::size_t i = 0; i < alloc.size(); ++i) {
    r.utilities[i] = utility_unchecked(params, alloc, i);
  }
  r.total_utility =
      std::accumulate(r.utilities.begin(), r.utilities.end(), 0.0);
  r.transfer_volume = alloc.z.volume();
  r.allocation = std::move(alloc);
  r.label = label;
  return r;
}

Allocation full_sharing_allocation(std::span<const double> x) {
  const std::size_t n = x.size();
  Allocation a;
  a.x.assign(x.begin(), x.end());
  a.y = a.x;
  a.z = TransferMatrix(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) a.z(j, i) = x[i];
    }
  }
  return a;
}

std::vector<double> normalize_split(std::span<const double> split, int n) {
  if (split.empty()) {
    return std::vector<double>(static_cast<std::size_t>(n),
                               1.0 / static_cast<double>(n));
  }
  if (split.size() != static_cast<std::size_t>(n)) {
    std::ostringstream os;
    os << "split has " << split.size() << " weights for " << n << " peers";
    throw PreconditionError(os.str());
  }
  double sum = 0.0;
  for (double w : split) {
    if (!(w >= 0.0)) throw PreconditionError("split weights must be >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "split weights must sum to 1, got " << sum;
    throw PreconditionError(os.str());
  }
  return {split.begin(), split.end()};
}

SolutionReport solve_noncooperative(const CpsParams& params) {
  validate(params);
  const auto n = static_cast<std::size_t>(params.n_peers);
  Allocation a;
  a.x.assign(n, maximizer(params.benefit, params.kappa));
  a.y.assign(n, 0.0);
  a.z = TransferMatrix(n);
  return make_report(params, std::move(a), SolutionConcept::kSE);
}

namespace {

std::vector<double> scaled(const std::vector<double>& w, double total) {
  std::vector<double> x(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) x[i] = w[i] * total;
  return x;
}

}  // namespace

SolutionReport solve_pareto(const CpsParams& params,
                            std::span<const double> split) {
  validate(params);
  const auto w = normalize_split(split, params.n_peers);
  const double total =
      maximizer(params.benefit, beta_tilde(params, params.n_peers));
  return make_report(params, full_sharing_allocation(scaled(w, total)),
                     SolutionConcept::kPE);
}

SolutionReport solve_enforced_levels(const CpsParams& params,
                                     std::span<const double> y_e) {
  validate(params);
  if (y_e.size() != static_cast<std::size_t>(params.n_peers)) {
    throw PreconditionError("enforced levels: need one level per peer");
  }
  double sum = 0.0;
  for (double y : y_e) {
    if (!(y >= 0.0)) throw PreconditionError("enforced levels must be >= 0");
    sum += y;
  }
  const double lo = maximizer(params.benefit, params.kappa);
  const double hi = maximizer(params.benefit, params.delta);
  const double slack = 1e-9 * std::max(1.0, hi);
  std::ostringstream os;
  if (sum < lo - slack) {
    os << "enforced levels: sum " << sum << " is below the autarky level x_kappa = "
       << lo;
  } else if (sum > hi + slack) {
    os << "enforced levels: sum " << sum
       << " exceeds the download saturation level x_delta = " << hi;
  }
  if (!os.str().empty()) throw PreconditionError(os.str());
  return make_report(params, full_sharing_allocation(y_e),
                     SolutionConcept::kEnforcedLevels);
}

SolutionReport solve_full_sharing(const CpsParams& params,
                                  std::span<const double> split) {
  validate(params);
  const auto w = normalize_split(split, params.n_peers);
  const double total =
      maximizer(params.benefit, gamma_tilde(params, params.n_peers));
  return make_report(params, full_sharing_allocation(scaled(w, total)),
                     SolutionConcept::kFullSharing);
}

InefficiencyMetrics inefficiency(const CpsParams& params) {
  validate(params);
  const int n = params.n_peers;
  const double nc = conjugate(params.benefit, params.kappa);
  const double beta = beta_tilde(params, n);
  const double pe = conjugate(params.benefit, beta);
  const double x_fs = maximizer(params.benefit, gamma_tilde(params, n));
  const double fs = params.benefit.eval(x_fs) - beta * x_fs;
  InefficiencyMetrics m;
  m.poa = nc / pe;
  m.pons = x_fs == 0.0 ? std::numeric_limits<double>::infinity() : nc / fs;
  m.pou = fs / pe;
  return m;
}

}  // namespace cps
