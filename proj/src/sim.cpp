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

#include "cps/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "cps/benefit.hpp"
#include "cps/error.hpp"
#include "cps/incentives.hpp"
#include "cps/kernels.hpp"

namespace cps::sim {

const char* to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::kNone:
      return "none";
    case SchemeKind::kLinearPrice:
      return "pricing";
    case SchemeKind::kIntervention:
      return "intervention";
  }
  return "?";
}

std::size_t PeerView::rounds() const { return history_->size(); }

std::span<const double> PeerView::public_shares(std::size_t round) const {
  return history_->rounds().at(round).allocation.y;
}

double PeerView::own_production(std::size_t round) const {
  return history_->rounds().at(round).allocation.x.at(peer_);
}

std::vector<double> PeerView::own_downloads(std::size_t round) const {
  const auto& z = history_->rounds().at(round).allocation.z;
  std::vector<double> row(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) row[j] = z(peer_, j);
  return row;
}

double PeerView::own_upload(std::size_t round) const {
  return history_->rounds().at(round).allocation.z.upload(peer_);
}

double PeerView::own_payoff(std::size_t round) const {
  return history_->rounds().at(round).payoffs.at(peer_);
}

double download_cost(const CpsParams& params, const Scheme& scheme) {
  switch (scheme.kind) {
    case SchemeKind::kNone:
      return params.delta;
    case SchemeKind::kLinearPrice:
    case SchemeKind::kIntervention:
      return scheme.price + params.delta;
  }
  return params.delta;
}

namespace {

// Download row given the desired consumption level.
void fill_download_row(double target, std::size_t peer, double x,
                       std::span<const double> shares, double* row) {
  const std::size_t n = shares.size();
  double available = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j != peer) available += shares[j];
  }
  const double want = std::max(0.0, target - x);
  const double d = std::min(available, want);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == peer || available <= 0.0) {
      row[j] = 0.0;
    } else if (d == available) {
      row[j] = shares[j];
    } else {
      row[j] = std::min(shares[j], d * shares[j] / available);
    }
  }
}

double scheme_transfer(const Scheme& scheme, const TransferMatrix& z,
                       std::size_t peer, double* level) {
  *level = 0.0;
  switch (scheme.kind) {
    case SchemeKind::kNone:
      return 0.0;
    case SchemeKind::kLinearPrice:
      return LinearPrice{scheme.price}.payment(z, peer);
    case SchemeKind::kIntervention: {
      *level = InterventionFn{scheme.price}(rating(z, peer));
      return -*level * z.download(peer);
    }
  }
  return 0.0;
}

RoundRecord settle(const CpsParams& params, const Scheme& scheme,
                   Allocation alloc) {
  RoundRecord rec;
  const std::size_t n = alloc.size();
  rec.utilities.resize(n);
  rec.transfers.resize(n);
  rec.levels.resize(n);
  rec.payoffs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rec.utilities[i] = utility(params, alloc, i);
    rec.transfers[i] = scheme_transfer(scheme, alloc.z, i, &rec.levels[i]);
    rec.payoffs[i] = rec.utilities[i] + rec.transfers[i];
  }
  rec.allocation = std::move(alloc);
  return rec;
}

}  // namespace

std::vector<double> optimal_download_row(const CpsParams& params,
                                         const Scheme& scheme,
                                         std::size_t peer, double x,
                                         std::span<const double> shares) {
  std::vector<double> row(shares.size());
  fill_download_row(maximizer(params.benefit, download_cost(params, scheme)),
                    peer, x, shares, row.data());
  return row;
}

StationaryStrategy::StationaryStrategy(CpsParams params, Scheme scheme,
                                       double x, double share_fraction)
    : params_(std::move(params)),
      scheme_(scheme),
      x_(x),
      fraction_(std::clamp(share_fraction, 0.0, 1.0)) {}

double StationaryStrategy::produce(const PeerView&) { return x_; }

double StationaryStrategy::share(const PeerView&, double x) {
  return fraction_ * x;
}

std::vector<double> StationaryStrategy::download(const PeerView& view, double x,
                                                 std::span<const double> shares) {
  return optimal_download_row(params_, scheme_, view.peer(), x, shares);
}

GrimTriggerStrategy::GrimTriggerStrategy(CpsParams params,
                                         std::vector<double> target_shares,
                                         double target_x)
    : params_(std::move(params)),
      target_shares_(std::move(target_shares)),
      target_x_(target_x),
      autarky_x_(maximizer(params_.benefit, params_.kappa)) {}

void GrimTriggerStrategy::set_deviation(int round, double x, double share) {
  deviation_round_ = round;
  deviation_x_ = x;
  deviation_share_ = share;
}

bool GrimTriggerStrategy::punishing(const PeerView& view) {
  // History only grows, so rounds already scanned need no second look.
  if (scanned_ > view.rounds()) {
    scanned_ = 0;
    triggered_ = false;
  }
  for (; !triggered_ && scanned_ < view.rounds(); ++scanned_) {
    const auto y = view.public_shares(scanned_);
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (std::abs(y[j] - target_shares_[j]) > 1e-12) triggered_ = true;
    }
  }
  return triggered_;
}

bool GrimTriggerStrategy::deviating_now(const PeerView& view) const {
  return deviation_round_ > 0 &&
         view.rounds() + 1 == static_cast<std::size_t>(deviation_round_);
}

double GrimTriggerStrategy::produce(const PeerView& view) {
  if (punishing(view)) return autarky_x_;
  if (deviating_now(view)) return deviation_x_;
  return target_x_;
}

double GrimTriggerStrategy::share(const PeerView& view, double x) {
  if (punishing(view)) return 0.0;
  if (deviating_now(view)) return std::min(deviation_share_, x);
  return x;
}

std::vector<double> GrimTriggerStrategy::download(
    const PeerView& view, double x, std::span<const double> shares) {
  return optimal_download_row(params_, Scheme::none(), view.peer(), x, shares);
}

RoundRecord play_round(const CpsParams& params,
                       std::span<PeerStrategy* const> strategies,
                       const Scheme& scheme, const History& history) {
  validate(params);
  const std::size_t n = strategies.size();
  if (n != static_cast<std::size_t>(params.n_peers)) {
    throw PreconditionError("play_round: need one strategy per peer");
  }
  auto fail = [](std::size_t peer, const char* stage, const std::string& what) {
    std::ostringstream os;
    os << "play_round: peer " << peer << " stage " << stage << ": " << what;
    throw PreconditionError(os.str());
  };
  constexpr double tol = kFeasibilityTolerance;
  Allocation a;
  a.x.resize(n);
  a.y.resize(n);
  a.z = TransferMatrix(n);
  for (std::size_t i = 0; i < n; ++i) {
    a.x[i] = strategies[i]->produce(history.view(i));
    if (!(a.x[i] >= 0.0) || !std::isfinite(a.x[i])) {
      fail(i, "1 (produce)", "production must be finite and >= 0");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    a.y[i] = strategies[i]->share(history.view(i), a.x[i]);
    if (!(a.y[i] >= 0.0) || a.y[i] > a.x[i] + tol) {
      fail(i, "2 (share)", "sharing level must lie in [0, x_i]");
    }
    a.y[i] = std::min(a.y[i], a.x[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = strategies[i]->download(history.view(i), a.x[i], a.y);
    if (row.size() != n) fail(i, "3 (download)", "download row has wrong length");
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i ? std::abs(row[j]) > tol
                 : (!(row[j] >= 0.0) || row[j] > a.y[j] + tol)) {
        std::ostringstream os;
        os << "z[" << i << "][" << j << "] = " << row[j]
           << " outside [0, y_j]";
        fail(i, "3 (download)", os.str());
      }
      a.z(i, j) = j == i ? 0.0 : std::min(row[j], a.y[j]);
    }
  }
  RoundRecord rec = settle(params, scheme, std::move(a));
  rec.round = static_cast<int>(history.size()) + 1;
  return rec;
}

RoundRecord evaluate_profile(const CpsParams& params, const Scheme& scheme,
                             std::span<const double> xs,
                             std::span<const double> ys) {
  const std::size_t n = xs.size();
  const double target = maximizer(params.benefit, download_cost(params, scheme));
  Allocation a;
  a.x.assign(xs.begin(), xs.end());
  a.y.assign(ys.begin(), ys.end());
  a.z = TransferMatrix(n);
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    fill_download_row(target, i, a.x[i], a.y, row.data());
    for (std::size_t j = 0; j < n; ++j) a.z(i, j) = row[j];
  }
  return settle(params, scheme, std::move(a));
}

namespace {

// Payoff of `peer` alone, for the grid search inner loop. Mirrors settle()
// without building a full record.
double peer_payoff(const CpsParams& params, const Scheme& scheme, double target,
                   std::span<const double> xs, std::span<const double> ys,
                   std::size_t peer, std::vector<double>& row) {
  const std::size_t n = xs.size();
  double d = 0.0;
  double u = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    fill_download_row(target, i, xs[i], ys, row.data());
    if (i == peer) {
      for (std::size_t j = 0; j < n; ++j) d += row[j];
    } else {
      u += row[peer];
    }
  }
  const double x = xs[peer];
  const double v = params.benefit.eval(x + d) - params.kappa * x -
                   params.delta * d - params.sigma * u;
  switch (scheme.kind) {
    case SchemeKind::kNone:
      return v;
    case SchemeKind::kLinearPrice:
      return v + scheme.price * (u - d);
    case SchemeKind::kIntervention: {
      const double r = d == 0.0 ? std::numeric_limits<double>::infinity() : u / d;
      return v - InterventionFn{scheme.price}(r) * d;
    }
  }
  return v;
}

constexpr double kStrictImprovement = 1e-12;

}  // namespace

BestResponse best_response(const CpsParams& params, const Scheme& scheme,
                           std::span<const double> xs,
                           std::span<const double> ys, std::size_t peer,
                           const BestResponseConfig& config) {
  validate(params);
  const std::size_t n = xs.size();
  if (ys.size() != n || peer >= n) {
    throw PreconditionError("best_response: bad profile");
  }
  const double target = maximizer(params.benefit, download_cost(params, scheme));
  const double x_hi = 2.0 * maximizer(params.benefit, params.delta);
  const std::vector<double> base_x(xs.begin(), xs.end());
  const std::vector<double> base_y(ys.begin(), ys.end());
  auto objective = [&](double x, double frac) {
    thread_local std::vector<double> px, py, row;
    px = base_x;
    py = base_y;
    row.resize(n);
    px[peer] = x;
    py[peer] = frac * x;
    return peer_payoff(params, scheme, target, px, py, peer, row);
  };
  const int pts = std::max(config.grid_points, 3);
  auto zoom = [&](kernels::GridAxis ax, kernels::GridAxis af) {
    auto best = kernels::omp::grid_argmax(objective, ax, af);
    for (int level = 0; level < config.refinements; ++level) {
      const double dx = (ax.hi - ax.lo) / (pts - 1);
      const double df = (af.hi - af.lo) / (pts - 1);
      ax = {std::max(0.0, best.a - 2.0 * dx), std::min(x_hi, best.a + 2.0 * dx), pts};
      af = {std::max(0.0, best.b - 2.0 * df), std::min(1.0, best.b + 2.0 * df), pts};
      const auto refined = kernels::omp::grid_argmax(objective, ax, af);
      if (refined.value >= best.value) best = refined;
    }
    return best;
  };
  // The coarse grid can step over a narrow payoff peak, so the search is
  // also refined around the incumbent, which is kept unless strictly beaten.
  const double x0 = std::clamp(xs[peer], 0.0, x_hi);
  const double f0 = xs[peer] > 0.0 ? std::clamp(ys[peer] / xs[peer], 0.0, 1.0) : 0.0;
  kernels::GridMax best{0, 0, x0, f0, objective(x0, f0)};
  const double dx0 = x_hi / (pts - 1);
  const double df0 = 1.0 / (pts - 1);
  for (const auto& cand :
       {zoom({0.0, x_hi, pts}, {0.0, 1.0, pts}),
        zoom({std::max(0.0, x0 - 2.0 * dx0), std::min(x_hi, x0 + 2.0 * dx0), pts},
             {std::max(0.0, f0 - 2.0 * df0), std::min(1.0, f0 + 2.0 * df0), pts})}) {
    if (cand.value > best.value + kStrictImprovement) best = cand;
  }
  return {best.a, best.b, best.value};
}

namespace {

bool matches_prediction(const CpsParams& params, const Scheme& scheme,
                        const std::vector<double>& x,
                        const std::vector<double>& y, double tolerance) {
  const int n = params.n_peers;
  const double xb = maximizer(params.benefit, beta_tilde(params, n));
  const double tol = tolerance * xb;
  switch (scheme.kind) {
    case SchemeKind::kNone: {
      const double xk = maximizer(params.benefit, params.kappa);
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::abs(x[i] - xk) > tol || y[i] > tol) return false;
      }
      return true;
    }
    case SchemeKind::kLinearPrice: {
      const double total = std::accumulate(x.begin(), x.end(), 0.0);
      if (std::abs(total - xb) > tol) return false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::abs(y[i] - x[i]) > tol) return false;
      }
      return true;
    }
    case SchemeKind::kIntervention: {
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::abs(x[i] - xb / n) > tol || std::abs(y[i] - x[i]) > tol) {
          return false;
        }
      }
      return true;
    }
  }
  return false;
}

void record(RunStats& stats, const RoundRecord& rec,
            std::vector<RunningMean>& means) {
  stats.payoffs.push_back(rec.payoffs);
  stats.transfer_volumes.push_back(rec.allocation.z.volume());
  for (std::size_t i = 0; i < means.size(); ++i) means[i].add(rec.payoffs[i]);
}

std::vector<double> means_of(const std::vector<RunningMean>& means) {
  std::vector<double> out;
  for (const auto& m : means) out.push_back(m.value());
  return out;
}

}  // namespace

RunStats best_response_dynamics(const CpsParams& params, const Scheme& scheme,
                                std::span<const InitialPlay> init, int rounds,
                                std::uint64_t seed,
                                const BestResponseConfig& config) {
  validate(params);
  const auto n = static_cast<std::size_t>(params.n_peers);
  if (init.size() != n) {
    throw PreconditionError("best_response_dynamics: need one initial play per peer");
  }
  if (rounds < 1) throw PreconditionError("best_response_dynamics: rounds >= 1");
  std::vector<std::unique_ptr<StationaryStrategy>> owned;
  for (const auto& p : init) {
    owned.push_back(std::make_unique<StationaryStrategy>(params, scheme, p.x,
                                                         p.share_fraction));
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  RunStats stats;
  stats.seed = seed;
  stats.horizon = rounds;
  std::vector<RunningMean> means(n);
  History history;
  std::vector<PeerStrategy*> view(n);
  for (int r = 0; r < rounds; ++r) {
    for (std::size_t i = 0; i < n; ++i) view[i] = owned[i].get();
    auto rec = play_round(params, view, scheme, history);
    record(stats, rec, means);
    const std::size_t mover = pick(rng);
    const auto br = best_response(params, scheme, rec.allocation.x,
                                  rec.allocation.y, mover, config);
    owned[mover] = std::make_unique<StationaryStrategy>(params, scheme, br.x,
                                                        br.share_fraction);
    history.append(std::move(rec));
  }
  for (std::size_t i = 0; i < n; ++i) {
    stats.final_x.push_back(owned[i]->production());
    stats.final_y.push_back(owned[i]->production() * owned[i]->share_fraction());
  }
  stats.running_means = means_of(means);
  stats.converged = matches_prediction(params, scheme, stats.final_x,
                                       stats.final_y, config.tolerance);
  return stats;
}

RunStats grim_trigger_run(const CpsParams& params, const Allocation& target,
                          std::optional<std::size_t> deviant,
                          int deviation_round, int rounds,
                          const BestResponseConfig& config) {
  if (!check_participation_efficient(params, target)) {
    throw PreconditionError(
        "grim_trigger_run: target allocation is not participation efficient");
  }
  if (rounds < 1) throw PreconditionError("grim_trigger_run: rounds >= 1");
  const std::size_t n = target.size();
  if (deviant && (*deviant >= n || deviation_round < 1)) {
    throw PreconditionError("grim_trigger_run: bad deviant or deviation round");
  }
  std::vector<std::unique_ptr<GrimTriggerStrategy>> owned;
  for (std::size_t i = 0; i < n; ++i) {
    owned.push_back(
        std::make_unique<GrimTriggerStrategy>(params, target.y, target.x[i]));
  }
  RunStats stats;
  stats.horizon = rounds;
  if (deviant) {
    const auto br = best_response(params, Scheme::none(), target.x, target.y,
                                  *deviant, config);
    owned[*deviant]->set_deviation(deviation_round, br.x, br.share_fraction * br.x);
    stats.deviation_payoff = br.payoff;
    stats.cooperative_payoff = utility(params, target, *deviant);
  }
  std::vector<RunningMean> means(n);
  History history;
  std::vector<PeerStrategy*> view;
  for (auto& s : owned) view.push_back(s.get());
  for (int r = 0; r < rounds; ++r) {
    auto rec = play_round(params, view, Scheme::none(), history);
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(rec.allocation.y[j] - target.y[j]) > 1e-12) {
        rec.punishment_triggered = true;
      }
    }
    if (rec.punishment_triggered && stats.detection_round == 0) {
      stats.detection_round = rec.round;
    }
    record(stats, rec, means);
    history.append(std::move(rec));
  }
  const auto& last = history.rounds().back().allocation;
  stats.final_x = last.x;
  stats.final_y = last.y;
  stats.running_means = means_of(means);
  return stats;
}

}  // namespace cps::sim
