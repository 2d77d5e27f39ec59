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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cps/benefit.hpp"
#include "cps/coalitional.hpp"
#include "cps/error.hpp"
#include "cps/game.hpp"
#include "oracles.hpp"

using oracle::default_params;

namespace {

double fs_average(int n) {
  const double x = oracle::log_maximizer(0.3 + (n - 1) * 0.01);
  return std::log1p(x) - oracle::default_beta(n) * x;
}

// v^FS by size under the default parameters, with groups of five.
double vfs_value(int s) {
  const int r = s % 5;
  return (s / 5) * 5 * fs_average(5) + (r > 0 ? r * fs_average(r) : 0.0);
}

std::vector<double> equal(int n, double total) {
  return std::vector<double>(static_cast<std::size_t>(n), total / n);
}

}  // namespace

TEST_CASE("coalition bitmask") {
  const auto s = cps::Coalition::of({0, 2, 5});
  CHECK(s.size() == 3);
  CHECK(s.contains(2));
  CHECK_FALSE(s.contains(1));
  CHECK(s.to_string() == "{0,2,5}");
  CHECK(s.members() == std::vector<int>{0, 2, 5});
  CHECK(cps::Coalition::grand(3).bits() == 7U);
  CHECK(cps::Coalition().to_string() == "{}");
  CHECK(s.with(1).size() == 4);
}

TEST_CASE("scale tables") {
  const auto p = default_params(100);
  const auto t = cps::scale_tables(p, 100);
  const double fk = oracle::log_conjugate(0.3);
  CHECK(t.beta_tilde[1] == doctest::Approx(0.3));
  CHECK(t.gamma_tilde[1] == doctest::Approx(0.3));
  CHECK(std::abs(t.g[1] - fk) < 1e-12);
  CHECK(std::abs(t.mp[1] - fk) < 1e-12);
  const double xds = oracle::log_maximizer(0.0125);
  for (int n = 2; n <= 100; ++n) {
    const auto k = static_cast<std::size_t>(n);
    CHECK(std::abs(t.g[k] - oracle::log_conjugate(oracle::default_beta(n))) < 1e-9);
    CHECK(t.g[k] > t.g[k - 1]);
    CHECK(t.mp[k] > t.g[k]);
    CHECK(std::abs((n - 1) * (t.g[k] - t.g[k - 1]) - (t.mp[k] - t.g[k])) < 1e-9);
    CHECK(t.mp[k] - t.g[k] < xds * (0.3 - 0.0125) / n);
    CHECK(std::abs(t.G[k] - n * t.g[k]) < 1e-9);
    CHECK(std::abs(t.g_fs[k] - fs_average(n)) < 1e-9);
  }
  CHECK(std::abs(t.g[100] - 3.19039) < 1e-5);
  CHECK(t.g[100] < oracle::log_conjugate(0.0125));
}

TEST_CASE("marginal product rises then its excess over g shrinks") {
  const auto t = cps::scale_tables(default_params(100), 100);
  int crossover = 2;
  for (int n = 3; n <= 100; ++n) {
    const auto k = static_cast<std::size_t>(n);
    if (t.mp[k] - t.g[k] > t.mp[k - 1] - t.g[k - 1]) crossover = n;
  }
  for (int n = crossover + 1; n <= 100; ++n) {
    const auto k = static_cast<std::size_t>(n);
    CHECK(t.mp[k] - t.g[k] < t.mp[k - 1] - t.g[k - 1]);
  }
  CHECK(crossover < 20);
}

TEST_CASE("coalition game structure") {
  std::mt19937_64 rng(17);
  for (int draw = 0; draw < 5; ++draw) {
    const int n = 6;
    const auto p = oracle::random_log_params(rng, n);
    const auto v = cps::coalition_game(p);
    const auto ref = oracle::log_game(p.kappa, p.delta, p.sigma, n);
    CHECK(v(cps::Coalition()) == 0.0);
    const std::uint64_t grand = (1U << n) - 1;
    for (std::uint64_t s = 1; s <= grand; ++s) {
      CHECK(std::abs(v(cps::Coalition(s)) - ref(s)) < 1e-9);
    }
    // convexity, exhaustive over S subset of T, i outside T
    for (std::uint64_t t = 0; t <= grand; ++t) {
      for (std::uint64_t s = t;; s = (s - 1) & t) {
        for (int i = 0; i < n; ++i) {
          const std::uint64_t bit = std::uint64_t{1} << i;
          if (t & bit) continue;
          const double ms = v(cps::Coalition(s | bit)) - v(cps::Coalition(s));
          const double mt = v(cps::Coalition(t | bit)) - v(cps::Coalition(t));
          CHECK(ms <= mt + 1e-12);
        }
        if (s == 0) break;
      }
    }
    // superadditivity on disjoint pairs
    for (int k = 0; k < 50; ++k) {
      const std::uint64_t a = rng() & grand;
      const std::uint64_t b = rng() & grand & ~a;
      CHECK(v(cps::Coalition(a | b)) >=
            v(cps::Coalition(a)) + v(cps::Coalition(b)) - 1e-12);
    }
  }
}

TEST_CASE("Shapley value") {
  const auto p2 = default_params(2);
  const auto sh = cps::shapley(p2);
  const double fb = oracle::log_conjugate(0.15625);
  CHECK(std::abs(sh[0] - fb) < 1e-9);
  CHECK(std::abs(sh[1] - fb) < 1e-9);
  const auto ref = oracle::log_game(0.3, 0.0025, 0.01, 2);
  const auto perm = oracle::shapley_permutations(ref, 2);
  CHECK(std::abs(perm[0] - sh[0]) < 1e-9);

  std::mt19937_64 rng(19);
  for (int n = 1; n <= 6; ++n) {
    const auto p = oracle::random_log_params(rng, n);
    const auto s = cps::shapley(p);
    const auto game = oracle::log_game(p.kappa, p.delta, p.sigma, n);
    const auto o = oracle::shapley_permutations(game, n);
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(s[static_cast<std::size_t>(i)] - o[static_cast<std::size_t>(i)]) < 1e-9);
    }
    const double sum = std::accumulate(s.begin(), s.end(), 0.0);
    CHECK(std::abs(sum - cps::scale_tables(p, n).G.back()) < 1e-9);
  }
  CHECK(std::abs(cps::shapley(default_params(1))[0] - oracle::log_conjugate(0.3)) < 1e-12);
}

TEST_CASE("core vertices") {
  const auto v2 = cps::core_vertices(default_params(2));
  REQUIRE(v2.size() == 2);
  const double mp2 = 2.0 * oracle::log_conjugate(0.15625) - oracle::log_conjugate(0.3);
  CHECK(std::abs(mp2 - 1.5211232) < 1e-6);
  CHECK(std::abs(v2[0][0] - oracle::log_conjugate(0.3)) < 1e-9);
  CHECK(std::abs(v2[0][1] - mp2) < 1e-9);
  CHECK(std::abs(v2[1][0] - mp2) < 1e-9);
  CHECK(std::abs(v2[1][1] - oracle::log_conjugate(0.3)) < 1e-9);

  const auto v1 = cps::core_vertices(default_params(1));
  REQUIRE(v1.size() == 1);
  CHECK(std::abs(v1[0][0] - oracle::log_conjugate(0.3)) < 1e-12);

  CHECK_THROWS_AS(cps::core_vertices(default_params(9)), cps::PreconditionError);

  std::mt19937_64 rng(23);
  for (int n = 2; n <= 6; ++n) {
    const auto p = oracle::random_log_params(rng, n);
    const auto vertices = cps::core_vertices(p);
    std::size_t fact = 1;
    for (int k = 2; k <= n; ++k) fact *= static_cast<std::size_t>(k);
    CHECK(vertices.size() == fact);
    const auto game = oracle::log_game(p.kappa, p.delta, p.sigma, n);
    std::vector<double> centroid(static_cast<std::size_t>(n), 0.0);
    for (const auto& u : vertices) {
      CHECK(oracle::in_core_exhaustive(game, u, 1e-9));
      const auto x = cps::production_for_utilities(p, u);
      CHECK(oracle::production_core_exhaustive(p.kappa, p.delta, p.sigma, x, 1e-8));
      CHECK(cps::is_in_core(p, x).in_core);
      for (std::size_t i = 0; i < u.size(); ++i) centroid[i] += u[i] / vertices.size();
    }
    const auto sh = cps::shapley(p);
    for (std::size_t i = 0; i < centroid.size(); ++i) {
      CHECK(std::abs(centroid[i] - sh[i]) < 1e-9);
    }
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int k = 0; k < 20; ++k) {
      std::vector<double> w(vertices.size());
      for (double& wi : w) wi = u01(rng);
      const double total = std::accumulate(w.begin(), w.end(), 0.0);
      std::vector<double> mix(static_cast<std::size_t>(n), 0.0);
      for (std::size_t j = 0; j < vertices.size(); ++j) {
        for (std::size_t i = 0; i < mix.size(); ++i) {
          mix[i] += w[j] / total * vertices[j][i];
        }
      }
      CHECK(oracle::in_core_exhaustive(game, mix, 1e-9));
      const auto x = cps::production_for_utilities(p, mix);
      CHECK(cps::is_in_core(p, x).in_core);
    }
  }
}

TEST_CASE("core membership of production profiles") {
  const auto p3 = default_params(3);
  const double xb = oracle::log_maximizer(oracle::default_beta(3));
  CHECK(cps::is_in_core(p3, equal(3, xb)).in_core);

  const std::vector<double> lopsided = {xb, 0.0, 0.0};
  const auto check = cps::is_in_core(p3, lopsided);
  CHECK_FALSE(check.in_core);
  REQUIRE(check.violating.has_value());
  CHECK(check.violating->contains(0));
  CHECK_FALSE(oracle::production_core_exhaustive(0.3, 0.0025, 0.01, lopsided, 1e-9));

  const std::vector<double> short_total = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(cps::is_in_core(p3, short_total), cps::PreconditionError);

  // N = 2 boundary where the singleton bound binds for peer 0.
  const auto p2 = default_params(2);
  const double xb2 = oracle::log_maximizer(0.15625);
  const double c = 0.3 + 0.01 - 0.0025;
  const double x1 =
      (std::log1p(xb2) - 0.0025 * xb2 - oracle::log_conjugate(0.3)) / c;
  const std::vector<double> boundary = {x1, xb2 - x1};
  CHECK(cps::is_in_core(p2, boundary).in_core);
  CHECK(oracle::production_core_exhaustive(0.3, 0.0025, 0.01, boundary, 1e-9));
  const std::vector<double> beyond = {x1 + 1e-4, xb2 - x1 - 1e-4};
  CHECK_FALSE(cps::is_in_core(p2, beyond).in_core);

  // Random PE profiles agree with the exhaustive check.
  std::mt19937_64 rng(29);
  for (int k = 0; k < 300; ++k) {
    const int n = 2 + static_cast<int>(rng() % 6);
    const auto p = oracle::random_log_params(rng, n);
    const double total = oracle::log_maximizer(
        oracle::beta(p.kappa, p.delta, p.sigma, n));
    std::exponential_distribution<double> ex(1.0);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (double& xi : x) xi = ex(rng);
    const double s = std::accumulate(x.begin(), x.end(), 0.0);
    for (double& xi : x) xi *= total / s;
    const bool fast = cps::is_in_core(p, x).in_core;
    const bool slow = oracle::production_core_exhaustive(p.kappa, p.delta, p.sigma, x, 1e-9);
    CHECK(fast == slow);
  }
}

TEST_CASE("participation bound") {
  CHECK_THROWS_AS(cps::participation_bound(default_params(1)), cps::PreconditionError);
  std::mt19937_64 rng(31);
  for (int k = 0; k < 100; ++k) {
    const int n = 2 + static_cast<int>(rng() % 20);
    const auto p = oracle::random_log_params(rng, n);
    const double bound = cps::participation_bound(p);
    const double xb = oracle::log_maximizer(oracle::beta(p.kappa, p.delta, p.sigma, n));
    const double c = p.kappa + (n - 1) * p.sigma - p.delta;
    CHECK(xb / n <= bound);
    CHECK(std::abs(bound * c + oracle::log_conjugate(p.kappa) -
                   (std::log1p(xb) - p.delta * xb)) < 1e-9);
    CHECK(bound == doctest::Approx(cps::core_production_bound(p, 1)).epsilon(1e-12));
    if (bound * 1.01 < xb) {
      std::vector<double> split(static_cast<std::size_t>(n),
                                (1.0 - bound * 1.01 / xb) / (n - 1));
      split[0] = bound * 1.01 / xb;
      const auto r = cps::solve_pareto(p, split);
      CHECK(r.utilities[0] < oracle::log_conjugate(p.kappa));
    }
  }
}

TEST_CASE("optimal group size") {
  const auto r = cps::optimal_group_size(default_params(10));
  CHECK(r.n_star == 5);
  CHECK(r.search_limit == 71);
  CHECK_FALSE(r.tie);
  CHECK(std::abs(r.value - fs_average(5)) < 1e-9);
  // brute-force over a wider range than the search limit
  for (int n = 1; n <= 200; ++n) {
    if (n != 5) CHECK(fs_average(n) < r.value);
  }

  // gamma~(2) = kappa + sigma = 1.3 exceeds f'(0), so sharing never pays.
  auto p = default_params(10);
  p.delta = 0.001;
  p.sigma = 0.6;
  p.kappa = 0.7;
  CHECK(cps::optimal_group_size(p).n_star == 1);
}

TEST_CASE("full-sharing coalition values and core") {
  const auto p = default_params(7);
  CHECK(std::abs(cps::full_sharing_coalition_value(p, 5, 7) -
                 (5 * fs_average(5) + 2 * fs_average(2))) < 1e-9);
  CHECK(std::abs(cps::full_sharing_coalition_value(p, 5, 10) - 10 * fs_average(5)) < 1e-9);
  CHECK(cps::full_sharing_coalition_value(p, 5, 0) == 0.0);

  const auto unique = cps::vfs_core(default_params(10), 10);
  CHECK_FALSE(unique.empty);
  CHECK(unique.n_star == 5);
  REQUIRE(unique.profile.size() == 10);
  for (double u : unique.profile) CHECK(std::abs(u - 0.9429273) < 1e-6);

  const auto empty = cps::vfs_core(default_params(7), 7);
  CHECK(empty.empty);
  REQUIRE(empty.blocking.has_value());
  double paid = 0.0;
  for (int i : empty.blocking->members()) {
    paid += empty.tested_profile[static_cast<std::size_t>(i)];
  }
  CHECK(vfs_value(empty.blocking->size()) > paid + 1e-9);

  CHECK_THROWS_AS(cps::vfs_core(default_params(5), 5), cps::PreconditionError);
  CHECK_THROWS_AS(cps::vfs_core(default_params(4), 4), cps::PreconditionError);
}

TEST_CASE("full-sharing core agrees with exhaustive search") {
  // A symmetric game has a nonempty core iff the equal split is unblocked.
  for (int total = 6; total <= 12; ++total) {
    oracle::SizeGame game;
    for (int s = 0; s <= total; ++s) game.by_size.push_back(vfs_value(s));
    const auto split = equal(total, vfs_value(total));
    const bool nonempty = oracle::in_core_exhaustive(game, split, 1e-9);
    const auto core = cps::vfs_core(default_params(total), total);
    CHECK(core.empty == !nonempty);
    CHECK(nonempty == (total % 5 == 0));
    const auto lib = cps::full_sharing_game(default_params(total), total);
    for (std::uint64_t s = 1; s < (std::uint64_t{1} << total); s += 37) {
      CHECK(std::abs(lib(cps::Coalition(s)) - game(s)) < 1e-9);
    }
    if (nonempty) {
      // Moving any payoff off the equal split is blocked.
      auto moved = split;
      moved[0] += 1e-3;
      moved[1] -= 1e-3;
      CHECK_FALSE(oracle::in_core_exhaustive(game, moved, 1e-9));
    }
  }
}
