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

#include "cps/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "cps/benefit.hpp"
#include "cps/coalitional.hpp"
#include "cps/error.hpp"
#include "cps/incentives.hpp"
#include "cps/sim.hpp"

namespace cps {

std::set<std::string> ExperimentConfig::all_schemes() {
  return {"none", "pricing", "intervention", "repeated", "full_sharing",
          "cooperative"};
}

CpsParams ExperimentConfig::params(int n) const {
  CpsParams p;
  p.n_peers = n;
  p.benefit = benefit == "log" ? log_benefit()
                               : distinct_files_benefit({a, M});
  p.kappa = kappa;
  p.delta = delta;
  p.sigma = sigma;
  return p;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  std::istringstream is(text);
  is >> value;
  if (is.fail() || !is.eof()) {
    throw PreconditionError("config: bad value for '" + key + "': " + text);
  }
  return value;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::string section;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    auto where = [&] { return " (line " + std::to_string(line_no) + ")"; };
    if (line.front() == '[') {
      if (line.back() != ']') throw PreconditionError("config: bad section" + where());
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw PreconditionError("config: expected key = value" + where());
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;
    if (full == "benefit.kind") {
      c.benefit = value;
    } else if (full == "benefit.a") {
      c.a = parse_number<double>(full, value);
    } else if (full == "benefit.M") {
      c.M = parse_number<long>(full, value);
    } else if (full == "costs.kappa") {
      c.kappa = parse_number<double>(full, value);
    } else if (full == "costs.delta") {
      c.delta = parse_number<double>(full, value);
    } else if (full == "costs.sigma") {
      c.sigma = parse_number<double>(full, value);
    } else if (full == "sweep.n_min") {
      c.n_min = parse_number<int>(full, value);
    } else if (full == "sweep.n_max") {
      c.n_max = parse_number<int>(full, value);
    } else if (full == "sweep.schemes") {
      c.schemes.clear();
      std::istringstream is(value);
      std::string item;
      while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) c.schemes.insert(item);
      }
    } else if (full == "run.out") {
      c.out_dir = value;
    } else if (full == "run.seed") {
      c.seed = parse_number<std::uint64_t>(full, value);
    } else {
      throw PreconditionError("config: unknown key '" + full + "'" + where());
    }
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  return parse_config(in);
}

void validate(const ExperimentConfig& c) {
  if (c.benefit != "log" && c.benefit != "distinct_files") {
    throw PreconditionError("config: benefit kind must be log or distinct_files");
  }
  if (c.n_min < 1 || c.n_max < c.n_min) {
    throw PreconditionError("config: n_range must satisfy 1 <= n_min <= n_max");
  }
  const auto known = ExperimentConfig::all_schemes();
  for (const auto& s : c.schemes) {
    if (!known.contains(s)) throw PreconditionError("config: unknown scheme '" + s + "'");
  }
  validate(c.params(c.n_min));
}

std::string format_value(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::map<std::string, std::string> figure_csvs(
    const ExperimentConfig& config,
    const std::vector<kernels::SweepRow>& rows) {
  const auto has = [&](const char* s) { return config.schemes.contains(s); };
  const bool coop = has("cooperative");
  const bool nc = has("none");
  const bool fs = has("full_sharing");
  const bool price = has("pricing") || has("intervention");
  std::map<std::string, std::ostringstream> out;
  const char* names[] = {"panel_a_average_utility.csv",
                         "panel_b_total_utility.csv",
                         "panel_c_marginal_product.csv",
                         "panel_d_inefficiency.csv",
                         "panel_e_transfer_volume.csv",
                         "panel_f_optimal_price.csv"};
  for (const char* name : names) out[name] << "n,series,value\n";
  auto emit = [&](const char* file, int n, const char* series, double v) {
    out[file] << n << ',' << series << ',' << format_value(v) << '\n';
  };
  for (const auto& r : rows) {
    if (coop) emit(names[0], r.n, "cooperative", r.avg_cooperative);
    if (nc) emit(names[0], r.n, "noncooperative", r.avg_noncooperative);
    if (fs) emit(names[0], r.n, "full_sharing", r.avg_full_sharing);
    if (coop) emit(names[1], r.n, "pi_pe", r.pi_pe);
    if (nc) emit(names[1], r.n, "pi_nc", r.pi_nc);
    if (fs) emit(names[1], r.n, "pi_fs", r.pi_fs);
    if (coop) {
      emit(names[2], r.n, "mp", r.mp);
      emit(names[2], r.n, "g", r.g);
    }
    if (nc && coop) emit(names[3], r.n, "poa", r.metrics.poa);
    if (nc && fs) emit(names[3], r.n, "pons", r.metrics.pons);
    if (fs && coop) emit(names[3], r.n, "pou", r.metrics.pou);
    if (coop) emit(names[4], r.n, "cooperative", r.w_pe);
    if (nc) emit(names[4], r.n, "noncooperative", r.w_nc);
    if (fs) emit(names[4], r.n, "full_sharing", r.w_fs);
    if (price) emit(names[5], r.n, "p_star", r.p_star);
  }
  std::map<std::string, std::string> result;
  for (auto& [name, os] : out) result[name] = os.str();
  return result;
}

std::vector<std::filesystem::path> run_figure_sweep(
    const ExperimentConfig& config) {
  validate(config);
  const auto rows =
      kernels::omp::sweep(config.params(config.n_min), config.n_min, config.n_max);
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) {
    throw IoError("cannot create output directory " + config.out_dir.string() +
                  ": " + ec.message());
  }
  std::vector<std::filesystem::path> written;
  for (const auto& [name, text] : figure_csvs(config, rows)) {
    const auto path = config.out_dir / name;
    std::ofstream f(path, std::ios::binary);
    f << text;
    f.close();
    if (!f) throw IoError("cannot write " + path.string());
    written.push_back(path);
  }
  return written;
}

namespace {

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_value(v[i]);
  }
  return s;
}

class ReportBuilder {
 public:
  ReportBuilder& line(std::string text) {
    report_.lines.push_back(std::move(text));
    return *this;
  }
  ReportBuilder& value(std::string key, std::string v) {
    report_.values.emplace_back(std::move(key), std::move(v));
    return *this;
  }
  ReportBuilder& value(std::string key, double v) {
    return value(std::move(key), format_value(v));
  }
  ReportBuilder& value(std::string key, const std::vector<double>& v) {
    return value(std::move(key), join(v));
  }
  Report take() { return std::move(report_); }

 private:
  Report report_;
};

std::string fixed(double v, int digits = 6) {
  if (std::isinf(v)) return "inf";
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

void describe(ReportBuilder& b, const std::string& key, const SolutionReport& r) {
  b.line(std::string(to_string(r.label)) + ": total utility " +
         fixed(r.total_utility) + ", transfer volume " +
         fixed(r.transfer_volume) + ", production " + join(r.allocation.x));
  b.value(key + ".total_utility", r.total_utility);
  b.value(key + ".transfer_volume", r.transfer_volume);
  b.value(key + ".utilities", r.utilities);
  b.value(key + ".x", r.allocation.x);
}

Report solve_report(const CpsParams& p) {
  ReportBuilder b;
  b.line("N=" + std::to_string(p.n_peers));
  b.value("n", std::to_string(p.n_peers));
  describe(b, "se", solve_noncooperative(p));
  describe(b, "pe", solve_pareto(p));
  describe(b, "fs", solve_full_sharing(p));
  const auto m = inefficiency(p);
  b.line("PoA " + fixed(m.poa) + ", PoNS " + fixed(m.pons) + ", PoU " +
         fixed(m.pou));
  b.value("poa", m.poa).value("pons", m.pons).value("pou", m.pou);
  return b.take();
}

Report core_report(const CpsParams& p) {
  ReportBuilder b;
  const auto sh = shapley(p);
  b.value("n", std::to_string(p.n_peers));
  if (p.n_peers <= kMaxVertexPeers) {
    const auto vertices = core_vertices(p);
    std::vector<double> centroid(static_cast<std::size_t>(p.n_peers), 0.0);
    for (const auto& v : vertices) {
      for (std::size_t i = 0; i < v.size(); ++i) centroid[i] += v[i];
    }
    for (double& c : centroid) c /= static_cast<double>(vertices.size());
    b.line(std::to_string(vertices.size()) + " core vertices");
    for (std::size_t k = 0; k < vertices.size(); ++k) {
      b.line("  (" + join(vertices[k]) + ")");
      b.value("vertex." + std::to_string(k), vertices[k]);
    }
    b.line("centroid (" + join(centroid) + ")");
    b.value("vertices", std::to_string(vertices.size()));
    b.value("centroid", centroid);
  } else {
    b.line("N > " + std::to_string(kMaxVertexPeers) + ": vertices not enumerated");
  }
  b.line("Shapley value (" + join(sh) + ")");
  b.value("shapley", sh);
  const auto xb = maximizer(p.benefit, beta_tilde(p, p.n_peers));
  const std::vector<double> equal(static_cast<std::size_t>(p.n_peers),
                                  xb / p.n_peers);
  const auto check = is_in_core(p, equal);
  b.line(std::string("equal split in core: ") + (check.in_core ? "yes" : "no"));
  b.value("equal_split_in_core", check.in_core ? "true" : "false");
  return b.take();
}

Report shapley_report(const CpsParams& p) {
  ReportBuilder b;
  const auto sh = shapley(p);
  const double sum = std::accumulate(sh.begin(), sh.end(), 0.0);
  b.line("Shapley value " + fixed(sh.front()) + " per peer, sum " + fixed(sum));
  b.value("n", std::to_string(p.n_peers));
  b.value("shapley", sh);
  b.value("sum", sum);
  b.value("G", scale_tables(p, p.n_peers).G.back());
  return b.take();
}

Report price_report(const CpsParams& p, const ReportOptions& o) {
  ReportBuilder b;
  const double p_star = optimal_price(p);
  const double p0 = o.p0 > 0.0 ? o.p0 : 0.5 * p_star;
  const auto t = run_price_adjustment(p, p0, o.eta, o.step, o.max_iters);
  b.line("p*=" + fixed(p_star, 8) + ", start " + fixed(p0, 8) + ", final " +
         fixed(t.prices.back(), 8) + " after " +
         std::to_string(t.prices.size() - 1) + " steps");
  b.value("p_star", p_star).value("p0", p0).value("p_final", t.prices.back());
  b.value("iterations", std::to_string(t.prices.size() - 1));
  b.value("converged", t.converged ? "true" : "false");
  return b.take();
}

Report quantity_report(const CpsParams& p, const ReportOptions& o) {
  ReportBuilder b;
  const auto n = static_cast<std::size_t>(p.n_peers);
  const double xb = maximizer(p.benefit, beta_tilde(p, p.n_peers));
  std::vector<double> x0 = o.x0.empty() ? std::vector<double>(n, xb) : o.x0;
  const std::vector<double> eta(n, o.eta);
  // Euler on this linear system is monotone for step * sum(eta) <= 1.
  const double step = std::min(o.step, 0.5 / (o.eta * static_cast<double>(n)));
  const auto t = run_quantity_adjustment(p, x0, eta, step, o.max_iters);
  const auto& last = t.states.back();
  const double total = std::accumulate(last.x.begin(), last.x.end(), 0.0);
  b.line("x_beta=" + fixed(xb) + ", final total production " + fixed(total) +
         " after " + std::to_string(t.states.size() - 1) + " steps");
  b.value("x_beta", xb).value("total", total);
  b.value("x_final", last.x).value("d_final", last.d);
  b.value("converged", t.converged ? "true" : "false");
  return b.take();
}

Report intervention_report(const CpsParams& p) {
  ReportBuilder b;
  const auto out = intervention_outcome(p);
  b.line("q*(r) = " + fixed(out.p_star, 8) + " [1 - r]+; production " +
         join(out.report.allocation.x));
  b.line("ratings " + join(out.ratings) + ", levels " + join(out.levels));
  b.value("p_star", out.p_star);
  b.value("x", out.report.allocation.x);
  b.value("ratings", out.ratings);
  b.value("levels", out.levels);
  b.value("payoffs", out.payoffs);
  return b.take();
}

Report repeated_report(const CpsParams& p, const ReportOptions& o) {
  ReportBuilder b;
  const auto target = solve_pareto(p).allocation;
  std::optional<std::size_t> deviant;
  if (o.deviant) deviant = static_cast<std::size_t>(*o.deviant);
  const auto stats =
      sim::grim_trigger_run(p, target, deviant, o.deviation_round, o.rounds);
  b.line("horizon " + std::to_string(stats.horizon) + ", running means " +
         join(stats.running_means));
  b.value("horizon", std::to_string(stats.horizon));
  b.value("running_means", stats.running_means);
  b.value("autarky", conjugate(p.benefit, p.kappa));
  if (deviant) {
    b.line("peer " + std::to_string(*deviant) + " deviates in round " +
           std::to_string(o.deviation_round) + ", detected in round " +
           std::to_string(stats.detection_round));
    b.value("detection_round", std::to_string(stats.detection_round));
    b.value("deviation_payoff", stats.deviation_payoff);
    b.value("cooperative_payoff", stats.cooperative_payoff);
  }
  return b.take();
}

Report group_size_report(const CpsParams& p, const ReportOptions& o) {
  ReportBuilder b;
  const auto gs = optimal_group_size(p);
  b.line("N*=" + std::to_string(gs.n_star));
  b.line("search limit " + std::to_string(gs.search_limit) + ", g_FS(N*) = " +
         fixed(gs.value));
  b.value("n_star", std::to_string(gs.n_star));
  b.value("search_limit", std::to_string(gs.search_limit));
  b.value("g_fs", gs.value);
  b.value("tie", gs.tie ? "true" : "false");
  if (gs.n_star < o.total_n) {
    const auto core = vfs_core(p, o.total_n);
    b.line("full-sharing core with N=" + std::to_string(o.total_n) + ": " +
           (core.empty ? "empty, blocked by " + core.blocking->to_string()
                       : "unique element " + fixed(core.profile.front())));
    b.value("vfs_core", core.empty ? "empty" : "unique");
    if (core.blocking) b.value("blocking", core.blocking->to_string());
  }
  return b.take();
}

}  // namespace

Report run_report(const ExperimentConfig& config, const std::string& subcommand,
                  const ReportOptions& options) {
  validate(config);
  const CpsParams p = config.params(options.n);
  validate(p);
  if (subcommand == "solve") return solve_report(p);
  if (subcommand == "core") return core_report(p);
  if (subcommand == "shapley") return shapley_report(p);
  if (subcommand == "price-dynamics") return price_report(p, options);
  if (subcommand == "quantity-dynamics") return quantity_report(p, options);
  if (subcommand == "intervention") return intervention_report(p);
  if (subcommand == "repeated") return repeated_report(p, options);
  if (subcommand == "group-size") return group_size_report(p, options);
  throw PreconditionError("unknown subcommand '" + subcommand + "'");
}

void print_report(std::ostream& os, const Report& report) {
  for (const auto& l : report.lines) os << l << '\n';
  os << '\n';
  for (const auto& [k, v] : report.values) os << k << '=' << v << '\n';
}

}  // namespace cps
