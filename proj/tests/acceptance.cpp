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

// Acceptance suite: one PASS/FAIL line per criterion with the measured
// value, the target and the tolerance. Exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "cps/benefit.hpp"
#include "cps/coalitional.hpp"
#include "cps/experiment.hpp"
#include "cps/incentives.hpp"
#include "cps/kernels.hpp"
#include "cps/sim.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using oracle::default_params;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %-28s %s (%.1f ms)\n", o.pass ? "PASS" : "FAIL", id, name,
              o.detail.c_str(), ms);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double elapsed_ms(const std::function<void()>& f, int reps = 1) {
  f();  // warm-up
  const auto t0 = std::chrono::steady_clock::now();
  for (int k = 0; k < reps; ++k) f();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
             .count() / reps;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// value of (series, n) in a panel CSV
double lookup(const std::string& csv, const std::string& series, int n) {
  std::istringstream in(csv);
  std::string line;
  const std::string key = std::to_string(n) + "," + series + ",";
  while (std::getline(in, line)) {
    if (line.rfind(key, 0) == 0) {
      const std::string v = line.substr(key.size());
      return v == "inf" ? INFINITY : std::stod(v);
    }
  }
  return NAN;
}

Outcome conjugate_anchor() {
  const auto f = cps::log_benefit();
  const double v = cps::conjugate(f, 0.0125);
  const double ms = elapsed_ms([&] { (void)cps::conjugate(f, 0.0125); }, 100);
  const bool ok = std::abs(v - 3.3945) <= 1e-4 && ms < 1.0;
  return {ok, fmt("f*(0.0125)=%.7f", v) + " target 3.3945 tol 1e-4" +
                  fmt(", runtime %.4f ms < 1 ms", ms)};
}

Outcome poa_asymptote() {
  const auto p = default_params(1);
  std::vector<cps::kernels::SweepRow> rows;
  const double ms = elapsed_ms([&] { rows = cps::kernels::omp::sweep(p, 1, 100); }, 5);
  bool monotone = true;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    monotone = monotone && rows[i].metrics.poa < rows[i - 1].metrics.poa;
  }
  const double poa = rows.back().metrics.poa;
  const bool ok = std::abs(poa - 0.1485) <= 2e-3 && monotone && ms < 10.0;
  return {ok, fmt("PoA(100)=%.6f", poa) + " target 0.1485 tol 2e-3" +
                  (monotone ? ", monotone" : ", NOT monotone") +
                  fmt(", sweep %.2f ms < 10 ms", ms)};
}

Outcome full_sharing_structure() {
  const auto p = default_params(1);
  const auto t = cps::scale_tables(p, 200);
  int arg = 1;
  for (int n = 1; n <= 200; ++n) {
    if (t.g_fs[static_cast<std::size_t>(n)] > t.g_fs[static_cast<std::size_t>(arg)]) arg = n;
  }
  int first_nonzero_after = 0;
  for (int n = 71; n <= 200; ++n) {
    if (t.g_fs[static_cast<std::size_t>(n)] != 0.0) {
      first_nonzero_after = n;
      break;
    }
  }
  const bool zero_before = t.g_fs[70] > 0.0;
  const auto gs = cps::optimal_group_size(p);
  const bool ok = arg == 5 && gs.n_star == 5 && !gs.tie && first_nonzero_after == 0 &&
                  zero_before;
  return {ok, "argmax g_FS=" + std::to_string(arg) + ", N*=" + std::to_string(gs.n_star) +
                  (first_nonzero_after ? ", nonzero at N=" + std::to_string(first_nonzero_after)
                                       : std::string(", zero for 71<=N<=200")) +
                  fmt(", g_FS(70)=%.5f", t.g_fs[70])};
}

Outcome price_limit() {
  double prev = INFINITY;
  bool decreasing = true;
  for (int n = 1; n <= 100; ++n) {
    const double p = cps::optimal_price(default_params(n));
    decreasing = decreasing && p < prev;
    prev = p;
  }
  const bool ok = decreasing && prev > 0.010 && prev < 0.011;
  return {ok, fmt("p*(100)=%.6f", prev) + " target (0.010, 0.011)" +
                  (decreasing ? ", strictly decreasing" : ", NOT decreasing")};
}

Outcome identities() {
  std::mt19937_64 rng(101);
  double worst_price = 0.0, worst_budget = 0.0, worst_poa = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const int n = 1 + static_cast<int>(rng() % 60);
    const auto p = oracle::random_log_params(rng, n);
    const double beta = cps::beta_tilde(p, n);
    worst_price = std::max(worst_price, std::abs(cps::optimal_price(p) + p.delta - beta) / beta);
    const auto m = cps::inefficiency(p);
    if (m.pou > 0.0 && std::isfinite(m.pons)) {
      worst_poa = std::max(worst_poa, std::abs(m.poa - m.pons * m.pou) / m.poa);
    }
    const std::size_t size = 2 + rng() % 12;
    cps::TransferMatrix z(size);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t j = 0; j < size; ++j) {
        if (i != j) z(i, j) = u(rng);
      }
    }
    const auto t = cps::LinearPrice{cps::optimal_price(p)}.payments(z);
    double sum = 0.0, scale = 0.0;
    for (double ti : t) {
      sum += ti;
      scale += std::abs(ti);
    }
    worst_budget = std::max(worst_budget, std::abs(sum) / scale);
  }
  const bool ok = worst_price <= 1e-9 && worst_budget <= 1e-9 && worst_poa <= 1e-9;
  return {ok, fmt("max rel err: p*+delta=beta %.2e", worst_price) +
                  fmt(", sum t %.2e", worst_budget) + fmt(", PoA=PoNS*PoU %.2e", worst_poa) +
                  " tol 1e-9"};
}

Outcome cooperative_oracles() {
  std::mt19937_64 rng(103);
  const auto t0 = std::chrono::steady_clock::now();
  int checked = 0;
  bool ok = true;
  for (int n = 2; n <= 6; ++n) {
    for (int draw = 0; draw < 10; ++draw) {
      const auto p = oracle::random_log_params(rng, n);
      const auto game = cps::coalition_game(p);
      const double fb = oracle::log_conjugate(oracle::beta(p.kappa, p.delta, p.sigma, n));
      for (double s : cps::kernels::omp::shapley_by_permutation(game)) {
        ok = ok && std::abs(s - fb) <= 1e-9;
      }
      const auto vertices = cps::core_vertices(p);
      auto passes = [&](const std::vector<double>& u) {
        const auto x = cps::production_for_utilities(p, u);
        return oracle::production_core_exhaustive(p.kappa, p.delta, p.sigma, x, 1e-8);
      };
      for (const auto& v : vertices) ok = ok && passes(v);
      std::uniform_real_distribution<double> u01(0.0, 1.0);
      for (int k = 0; k < 10; ++k) {
        std::vector<double> mix(static_cast<std::size_t>(n), 0.0);
        double wsum = 0.0;
        std::vector<double> w(vertices.size());
        for (double& wi : w) wsum += (wi = u01(rng));
        for (std::size_t j = 0; j < vertices.size(); ++j) {
          for (std::size_t i = 0; i < mix.size(); ++i) mix[i] += w[j] / wsum * vertices[j][i];
        }
        ok = ok && passes(mix);
      }
      const std::uint64_t grand = (std::uint64_t{1} << n) - 1;
      for (std::uint64_t t = 0; t <= grand; ++t) {
        for (std::uint64_t s = t;; s = (s - 1) & t) {
          for (int i = 0; i < n; ++i) {
            const std::uint64_t bit = std::uint64_t{1} << i;
            if (t & bit) continue;
            const double ms = game(cps::Coalition(s | bit)) - game(cps::Coalition(s));
            const double mt = game(cps::Coalition(t | bit)) - game(cps::Coalition(t));
            ok = ok && ms <= mt + 1e-12;
          }
          if (s == 0) break;
        }
      }
      ++checked;
    }
  }
  const double s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ok = ok && s < 10.0;
  return {ok, std::to_string(checked) + " games N=2..6: Shapley tol 1e-9, core vertices and "
              "mixtures exhaustive, convexity exhaustive" + fmt(", %.2f s < 10 s", s)};
}

Outcome dynamics() {
  std::mt19937_64 rng(107);
  const auto t0 = std::chrono::steady_clock::now();
  double worst_price = 0.0, worst_total = 0.0, worst_drift = 0.0;
  int runs = 0;
  for (int set = 0; set < 10; ++set) {
    const int n = 2 + static_cast<int>(rng() % 10);
    const auto p = oracle::random_log_params(rng, n);
    const double ps = cps::optimal_price(p);
    std::uniform_real_distribution<double> start(0.05 * ps, 5.0 * ps);
    for (int k = 0; k < 20; ++k) {
      const auto t = cps::run_price_adjustment(p, start(rng), 1.0, 0.01, 200000);
      worst_price = std::max(worst_price, std::abs(t.prices.back() - ps));
      ++runs;
    }
    const double xb = cps::maximizer(p.benefit, cps::beta_tilde(p, n));
    std::uniform_real_distribution<double> ux(0.0, xb);
    std::vector<double> x0(static_cast<std::size_t>(n)), eta(static_cast<std::size_t>(n), 1.0);
    for (double& x : x0) x = ux(rng);
    const auto q = cps::run_quantity_adjustment(p, x0, eta, 0.5 / n, 1000000);
    const auto& end = q.states.back();
    worst_total = std::max(worst_total,
                           std::abs(std::accumulate(end.x.begin(), end.x.end(), 0.0) - xb));
    for (const auto& s : q.states) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        worst_drift = std::max(worst_drift, std::abs(s.x[i] + s.d[i] - xb));
      }
    }
  }
  const double s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = worst_price < 1e-4 && worst_total < 1e-4 && worst_drift < 1e-9 && s < 30.0;
  return {ok, std::to_string(runs) + fmt(" price runs: max |p-p*|=%.2e", worst_price) +
                  fmt("; quantity: max |sum x - x_beta|=%.2e", worst_total) +
                  fmt(", max |x+d-x_beta|=%.2e", worst_drift) + " tol 1e-4" +
                  fmt(", %.1f s < 30 s", s)};
}

Outcome best_response_fixed_points() {
  using cps::sim::Scheme;
  const auto t0 = std::chrono::steady_clock::now();
  int converged = 0, total = 0;
  std::string misses;
  for (int n : {2, 3}) {
    const auto p = default_params(n);
    const double ps = cps::optimal_price(p);
    const double xb = cps::maximizer(p.benefit, cps::beta_tilde(p, n));
    for (int kind = 0; kind < 3; ++kind) {
      Scheme scheme = kind == 0 ? Scheme::none()
                      : kind == 1 ? Scheme::linear(ps)
                                  : Scheme::intervention(ps);
      std::vector<cps::sim::InitialPlay> init;
      for (int i = 0; i < n; ++i) {
        if (kind == 2) {
          init.push_back({xb / n, 1.0});  // the predicted profile
        } else {
          init.push_back({1.0 + i, 0.5});
        }
      }
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto r = cps::sim::best_response_dynamics(p, scheme, init, 12 * n, seed);
        ++total;
        if (r.converged) {
          ++converged;
        } else {
          misses += " " + std::string(cps::sim::to_string(scheme.kind)) + "/N=" +
                    std::to_string(n) + "/seed=" + std::to_string(seed);
        }
      }
    }
  }
  const double s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = converged == total && s < 120.0;
  return {ok, std::to_string(converged) + "/" + std::to_string(total) +
                  " runs within 2% of x_beta" + (misses.empty() ? "" : ", missed:" + misses) +
                  fmt(", %.1f s < 120 s", s)};
}

Outcome grim_trigger_bound() {
  const auto p = default_params(3);
  const auto target = cps::solve_pareto(p).allocation;
  const int horizon = 10000;
  const auto r = cps::sim::grim_trigger_run(p, target, std::size_t{0}, 10, horizon);
  const double fk = oracle::log_conjugate(0.3);
  const double gain = r.deviation_payoff - r.cooperative_payoff;
  const double predicted = fk + gain / horizon;
  const double mean = r.running_means[0];
  const bool ok = mean < r.cooperative_payoff && std::abs(mean - predicted) <= 5e-3 &&
                  r.detection_round == 10;
  return {ok, fmt("deviant mean %.6f", mean) + fmt(" < cooperative %.6f", r.cooperative_payoff) +
                  fmt(", target f*(kappa)+gain/T=%.6f", predicted) + " tol 5e-3, detected round " +
                  std::to_string(r.detection_round)};
}

Outcome vfs_core_shape() {
  const auto ten = cps::vfs_core(default_params(10), 10);
  const double g5 = [] {
    const double x = oracle::log_maximizer(0.34);
    return std::log1p(x) - oracle::default_beta(5) * x;
  }();
  bool unique_ok = !ten.empty && ten.profile.size() == 10;
  for (double u : ten.profile) unique_ok = unique_ok && std::abs(u - g5) < 1e-9;
  const auto seven = cps::vfs_core(default_params(7), 7);
  bool witness_ok = seven.empty && seven.blocking.has_value();
  if (witness_ok) {
    double paid = 0.0;
    for (int i : seven.blocking->members()) {
      paid += seven.tested_profile[static_cast<std::size_t>(i)];
    }
    const auto game = cps::full_sharing_game(default_params(7), 7);
    witness_ok = game(*seven.blocking) > paid + 1e-12;
  }
  return {unique_ok && witness_ok,
          std::string("total_n=10: ") + (unique_ok ? "unique" : "WRONG") +
              fmt(" (%.6f each)", ten.profile.empty() ? NAN : ten.profile[0]) +
              ", total_n=7: " + (witness_ok ? "empty, blocked by " + seven.blocking->to_string()
                                            : std::string("WRONG"))};
}

Outcome figure_reproduction() {
  cps::ExperimentConfig cfg = cps::load_config(fs::path(CPS_SOURCE_DIR) / "configs" / "default.cfg");
  const auto base = fs::temp_directory_path() / "cpsgame_acceptance";
  fs::remove_all(base);
  cfg.out_dir = base / "first";
  const auto paths = cps::run_figure_sweep(cfg);
  cfg.out_dir = base / "second";
  cps::run_figure_sweep(cfg);
  bool golden = paths.size() == 6, rerun = true;
  for (const auto& p : paths) {
    const std::string text = slurp(p);
    rerun = rerun && text == slurp(base / "second" / p.filename());
    golden = golden && text == slurp(fs::path(CPS_GOLDEN_DIR) / p.filename());
  }
  const std::string a = slurp(base / "first" / "panel_a_average_utility.csv");
  const std::string d = slurp(base / "first" / "panel_d_inefficiency.csv");
  const std::string f = slurp(base / "first" / "panel_f_optimal_price.csv");
  // criterion 1: the cooperative average approaches f*(delta + sigma)
  bool c1 = true;
  for (int n = 2; n <= 100; ++n) {
    c1 = c1 && lookup(a, "cooperative", n) > lookup(a, "cooperative", n - 1) &&
         lookup(a, "cooperative", n) < 3.3945 + 1e-4;
  }
  // criterion 2
  bool c2 = std::abs(lookup(d, "poa", 100) - 0.1485) <= 2e-3;
  for (int n = 2; n <= 100; ++n) c2 = c2 && lookup(d, "poa", n) < lookup(d, "poa", n - 1);
  // criterion 3
  int arg = 1;
  bool zeros = true;
  for (int n = 1; n <= 100; ++n) {
    if (lookup(a, "full_sharing", n) > lookup(a, "full_sharing", arg)) arg = n;
    if (n >= 71) zeros = zeros && lookup(a, "full_sharing", n) == 0.0;
  }
  const bool c3 = arg == 5 && zeros;
  // criterion 4
  bool c4 = lookup(f, "p_star", 100) > 0.010 && lookup(f, "p_star", 100) < 0.011;
  for (int n = 2; n <= 100; ++n) c4 = c4 && lookup(f, "p_star", n) < lookup(f, "p_star", n - 1);
  const bool ok = golden && rerun && c1 && c2 && c3 && c4;
  auto flag = [](bool b) { return b ? "ok" : "FAIL"; };
  return {ok, std::string("golden ") + flag(golden) + ", rerun " + flag(rerun) +
                  "; anchors: cooperative->3.3945 " + flag(c1) + ", PoA(100) " + flag(c2) +
                  fmt(" (%.6f)", lookup(d, "poa", 100)) + ", g_FS peak/zeros " + flag(c3) +
                  ", p*(100) " + flag(c4) + fmt(" (%.6f)", lookup(f, "p_star", 100))};
}

}  // namespace

int main() {
  report(1, "conjugate anchor", conjugate_anchor);
  report(2, "PoA asymptote", poa_asymptote);
  report(3, "full-sharing structure", full_sharing_structure);
  report(4, "optimal-price limit", price_limit);
  report(5, "identity suite", identities);
  report(6, "cooperative oracles", cooperative_oracles);
  report(7, "dynamics convergence", dynamics);
  report(8, "best-response fixed points", best_response_fixed_points);
  report(9, "grim-trigger bound", grim_trigger_bound);
  report(10, "full-sharing core", vfs_core_shape);
  report(11, "figure reproduction", figure_reproduction);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
