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

#include "cps/coalitional.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cps/error.hpp"

namespace cps {

Coalition Coalition::of(std::initializer_list<int> members) {
  return of(std::span<const int>(members.begin(), members.size()));
}

Coalition Coalition::of(std::span<const int> members) {
  std::uint64_t bits = 0;
  for (int i : members) {
    if (i < 0 || i >= 64) throw PreconditionError("coalition member out of range");
    bits |= std::uint64_t{1} << i;
  }
  return Coalition(bits);
}

int Coalition::size() const { return std::popcount(bits_); }

std::vector<int> Coalition::members() const {
  std::vector<int> out;
  for (int i = 0; i < 64; ++i) {
    if (contains(i)) out.push_back(i);
  }
  return out;
}

std::string Coalition::to_string() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (int i : members()) {
    if (!first) os << ',';
    os << i;
    first = false;
  }
  os << '}';
  return os.str();
}

double full_sharing_average(const CpsParams& params, int n) {
  const double x = maximizer(params.benefit, gamma_tilde(params, n));
  return params.benefit.eval(x) - beta_tilde(params, n) * x;
}

ScaleTables scale_tables(const CpsParams& params, int n_max) {
  validate(params);
  if (n_max < 1) throw PreconditionError("scale_tables: n_max must be >= 1");
  ScaleTables t;
  t.n_max = n_max;
  const auto len = static_cast<std::size_t>(n_max) + 1;
  t.beta_tilde.assign(len, 0.0);
  t.gamma_tilde.assign(len, 0.0);
  t.g.assign(len, 0.0);
  t.G.assign(len, 0.0);
  t.mp.assign(len, 0.0);
  t.g_fs.assign(len, 0.0);
  for (int n = 1; n <= n_max; ++n) {
    const auto k = static_cast<std::size_t>(n);
    t.beta_tilde[k] = beta_tilde(params, n);
    t.gamma_tilde[k] = gamma_tilde(params, n);
    t.g[k] = conjugate(params.benefit, t.beta_tilde[k]);
    t.G[k] = n * t.g[k];
    t.mp[k] = t.G[k] - t.G[k - 1];
    t.g_fs[k] = full_sharing_average(params, n);
  }
  return t;
}

CoalitionValueFn coalition_game(const CpsParams& params) {
  validate(params);
  // v depends on |S| only; cache it per size.
  std::vector<double> by_size(static_cast<std::size_t>(params.n_peers) + 1, 0.0);
  for (int s = 1; s <= params.n_peers; ++s) {
    by_size[static_cast<std::size_t>(s)] =
        s * conjugate(params.benefit, beta_tilde(params, s));
  }
  return {params.n_peers, [by_size = std::move(by_size)](Coalition c) {
            return by_size[static_cast<std::size_t>(c.size())];
          }};
}

std::vector<double> shapley(const CpsParams& params) {
  validate(params);
  return std::vector<double>(
      static_cast<std::size_t>(params.n_peers),
      conjugate(params.benefit, beta_tilde(params, params.n_peers)));
}

std::vector<std::vector<double>> core_vertices(const CpsParams& params) {
  validate(params);
  if (params.n_peers > kMaxVertexPeers) {
    std::ostringstream os;
    os << "core_vertices: N = " << params.n_peers << " exceeds "
       << kMaxVertexPeers << "; use is_in_core instead";
    throw PreconditionError(os.str());
  }
  const auto t = scale_tables(params, params.n_peers);
  std::vector<double> base(t.mp.begin() + 1, t.mp.end());
  std::sort(base.begin(), base.end());
  std::vector<std::vector<double>> out;
  do {
    out.push_back(base);
  } while (std::next_permutation(base.begin(), base.end()));
  return out;
}

namespace {

double pe_production_cost(const CpsParams& params) {
  return params.kappa + (params.n_peers - 1) * params.sigma - params.delta;
}

double pe_shared_value(const CpsParams& params) {
  const double xb =
      maximizer(params.benefit, beta_tilde(params, params.n_peers));
  return params.benefit.eval(xb) - params.delta * xb;
}

}  // namespace

double core_production_bound(const CpsParams& params, int s) {
  return s *
         (pe_shared_value(params) -
          conjugate(params.benefit, beta_tilde(params, s))) /
         pe_production_cost(params);
}

std::vector<double> production_for_utilities(const CpsParams& params,
                                             std::span<const double> v) {
  validate(params);
  const double base = pe_shared_value(params);
  const double c = pe_production_cost(params);
  std::vector<double> x(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) x[i] = (base - v[i]) / c;
  return x;
}

CoreCheck is_in_core(const CpsParams& params, std::span<const double> x) {
  validate(params);
  const int n = params.n_peers;
  if (x.size() != static_cast<std::size_t>(n)) {
    throw PreconditionError("is_in_core: need one production level per peer");
  }
  const double xb = maximizer(params.benefit, beta_tilde(params, n));
  const double total = std::accumulate(x.begin(), x.end(), 0.0);
  if (std::abs(total - xb) > 1e-6) {
    std::ostringstream os;
    os << "is_in_core: total production " << total
       << " is not the PE level x_beta = " << xb;
    throw PreconditionError(os.str());
  }
  std::vector<int> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return x[a] > x[b]; });
  const double tol = 1e-9 * std::max(1.0, xb);
  double prefix = 0.0;
  for (int s = 1; s <= n; ++s) {
    prefix += x[static_cast<std::size_t>(order[s - 1])];
    if (prefix > core_production_bound(params, s) + tol) {
      return {false, Coalition::of(std::span<const int>(order.data(),
                                                        static_cast<std::size_t>(s)))};
    }
  }
  return {};
}

double participation_bound(const CpsParams& params) {
  validate(params);
  if (params.n_peers < 2) {
    throw PreconditionError("participation_bound: requires N >= 2");
  }
  return (pe_shared_value(params) - conjugate(params.benefit, params.kappa)) /
         pe_production_cost(params);
}

GroupSizeResult optimal_group_size(const CpsParams& params) {
  validate(params);
  GroupSizeResult r;
  const double raw =
      (params.benefit.deriv_at_zero - params.kappa) / params.sigma + 1.0;
  // Absorb round-off such as (1 - 0.3) / 0.01 = 69.99999999999999.
  r.search_limit = static_cast<int>(std::floor(raw + 1e-9 * std::max(1.0, raw)));
  std::vector<double> values(static_cast<std::size_t>(r.search_limit) + 1, 0.0);
  for (int n = 1; n <= r.search_limit; ++n) {
    values[static_cast<std::size_t>(n)] = full_sharing_average(params, n);
  }
  r.n_star = 1;
  r.value = values[1];
  for (int n = 2; n <= r.search_limit; ++n) {
    if (values[static_cast<std::size_t>(n)] > r.value) {
      r.value = values[static_cast<std::size_t>(n)];
      r.n_star = n;
    }
  }
  const double tol = 1e-12 * std::max(1.0, std::abs(r.value));
  for (int n = 1; n <= r.search_limit; ++n) {
    if (std::abs(values[static_cast<std::size_t>(n)] - r.value) <= tol) {
      r.tied.push_back(n);
    }
  }
  r.tie = r.tied.size() > 1;
  if (!r.tie) r.tied.clear();
  return r;
}

double full_sharing_coalition_value(const CpsParams& params, int n_star,
                                    int size) {
  if (size <= 0) return 0.0;
  const int groups = size / n_star;
  const int residual = size % n_star;
  double v = groups * n_star * full_sharing_average(params, n_star);
  if (residual > 0) v += residual * full_sharing_average(params, residual);
  return v;
}

CoalitionValueFn full_sharing_game(const CpsParams& params, int total_n) {
  const int n_star = optimal_group_size(params).n_star;
  std::vector<double> by_size(static_cast<std::size_t>(total_n) + 1, 0.0);
  for (int s = 1; s <= total_n; ++s) {
    by_size[static_cast<std::size_t>(s)] =
        full_sharing_coalition_value(params, n_star, s);
  }
  return {total_n, [by_size = std::move(by_size)](Coalition c) {
            return by_size[static_cast<std::size_t>(c.size())];
          }};
}

VfsCore vfs_core(const CpsParams& params, int total_n) {
  const auto gs = optimal_group_size(params);
  if (gs.n_star >= total_n) {
    std::ostringstream os;
    os << "vfs_core: requires N* < N, got N* = " << gs.n_star
       << " and N = " << total_n;
    throw PreconditionError(os.str());
  }
  VfsCore out;
  out.n_star = gs.n_star;
  const auto n = static_cast<std::size_t>(total_n);
  if (total_n % gs.n_star == 0) {
    out.profile.assign(n, gs.value);
    return out;
  }
  // Every efficient profile has some peer below g^FS(N*); the N* worst-off
  // peers then receive less than the N* g^FS(N*) they could secure alone.
  out.empty = true;
  const double grand = full_sharing_coalition_value(params, gs.n_star, total_n);
  out.tested_profile.assign(n, grand / static_cast<double>(total_n));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return out.tested_profile[static_cast<std::size_t>(a)] <
           out.tested_profile[static_cast<std::size_t>(b)];
  });
  out.blocking = Coalition::of(
      std::span<const int>(order.data(), static_cast<std::size_t>(gs.n_star)));
  return out;
}

}  // namespace cps
