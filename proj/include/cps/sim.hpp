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

#ifndef CPS_SIM_HPP_
#define CPS_SIM_HPP_

// Round-based play of the three-stage game with strategic peers.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "cps/game.hpp"

namespace cps::sim {

enum class SchemeKind { kNone, kLinearPrice, kIntervention };

struct Scheme {
  SchemeKind kind = SchemeKind::kNone;
  double price = 0.0;  // p for linear pricing, p* for intervention

  static Scheme none() { return {}; }
  static Scheme linear(double p) { return {SchemeKind::kLinearPrice, p}; }
  static Scheme intervention(double p_star) {
    return {SchemeKind::kIntervention, p_star};
  }
};

const char* to_string(SchemeKind kind);

struct RoundRecord {
  int round = 0;  // 1-based
  Allocation allocation;
  std::vector<double> utilities;  // v_i
  std::vector<double> transfers;  // p(u_i - d_i), or -q(r_i) d_i
  std::vector<double> levels;     // intervention levels q(r_i)
  std::vector<double> payoffs;    // v_i + transfer
  bool punishment_triggered = false;
};

class History;

// The part of the history peer i may condition on: every round's published
// sharing profile, plus its own production, downloads, uploads and payoff.
class PeerView {
 public:
  PeerView(const History& history, std::size_t peer)
      : history_(&history), peer_(peer) {}

  std::size_t peer() const { return peer_; }
  std::size_t rounds() const;
  std::span<const double> public_shares(std::size_t round) const;
  double own_production(std::size_t round) const;
  std::vector<double> own_downloads(std::size_t round) const;
  double own_upload(std::size_t round) const;
  double own_payoff(std::size_t round) const;

 private:
  const History* history_;
  std::size_t peer_;
};

class History {
 public:
  void append(RoundRecord record) { rounds_.push_back(std::move(record)); }
  const std::vector<RoundRecord>& rounds() const { return rounds_; }
  std::size_t size() const { return rounds_.size(); }
  PeerView view(std::size_t peer) const { return {*this, peer}; }

 private:
  std::vector<RoundRecord> rounds_;
};

class PeerStrategy {
 public:
  virtual ~PeerStrategy() = default;
  // Stage one: private production.
  virtual double produce(const PeerView& view) = 0;
  // Stage two: published sharing level in [0, x].
  virtual double share(const PeerView& view, double x) = 0;
  // Stage three: download row with entry j <= shares[j] and own entry 0.
  virtual std::vector<double> download(const PeerView& view, double x,
                                       std::span<const double> shares) = 0;
};

// Effective marginal download cost the built-in stage-three rule faces:
// delta, p + delta, or p* + delta under intervention (the surcharge equals
// a p* price while uploads do not exceed downloads).
double download_cost(const CpsParams& params, const Scheme& scheme);

// Optimal stage-three download for own production x given published shares:
// total d = min(available, max(0, x^_c - x)) at the effective cost c, drawn
// from each peer in proportion to its share.
std::vector<double> optimal_download_row(const CpsParams& params,
                                         const Scheme& scheme,
                                         std::size_t peer, double x,
                                         std::span<const double> shares);

// Produces a fixed amount, shares a fixed fraction of it and downloads
// optimally.
class StationaryStrategy : public PeerStrategy {
 public:
  StationaryStrategy(CpsParams params, Scheme scheme, double x,
                     double share_fraction);
  double produce(const PeerView& view) override;
  double share(const PeerView& view, double x) override;
  std::vector<double> download(const PeerView& view, double x,
                               std::span<const double> shares) override;

  double production() const { return x_; }
  double share_fraction() const { return fraction_; }

 private:
  CpsParams params_;
  Scheme scheme_;
  double x_;
  double fraction_;
};

// Cooperates on a target allocation while every published sharing profile
// so far equals the target's; plays the one-shot equilibrium (x^_kappa, no
// sharing) forever after. With a deviation round set, the peer instead
// plays (deviation_x, deviation_share) in that round. An instance follows a
// single history.
class GrimTriggerStrategy : public PeerStrategy {
 public:
  GrimTriggerStrategy(CpsParams params, std::vector<double> target_shares,
                      double target_x);
  void set_deviation(int round, double x, double share);

  double produce(const PeerView& view) override;
  double share(const PeerView& view, double x) override;
  std::vector<double> download(const PeerView& view, double x,
                               std::span<const double> shares) override;

 private:
  bool punishing(const PeerView& view);
  bool deviating_now(const PeerView& view) const;

  CpsParams params_;
  std::vector<double> target_shares_;
  double target_x_;
  double autarky_x_;
  int deviation_round_ = 0;
  double deviation_x_ = 0.0;
  double deviation_share_ = 0.0;
  std::size_t scanned_ = 0;
  bool triggered_ = false;
};

// Plays one round: production, publication of shares, downloads served up
// to each share, then scheme payments. Throws PreconditionError naming the
// peer and stage if a strategy returns an infeasible action.
RoundRecord play_round(const CpsParams& params,
                       std::span<PeerStrategy* const> strategies,
                       const Scheme& scheme, const History& history);

// Payoffs when everyone plays (xs[i], ys[i]) and downloads optimally.
RoundRecord evaluate_profile(const CpsParams& params, const Scheme& scheme,
                             std::span<const double> xs,
                             std::span<const double> ys);

// Long-run average of a payoff stream, the finite-horizon stand-in for the
// limit of means.
class RunningMean {
 public:
  void add(double value) {
    ++count_;
    mean_ += (value - mean_) / static_cast<double>(count_);
  }
  double value() const { return mean_; }
  std::size_t count() const { return count_; }

 private:
  double mean_ = 0.0;
  std::size_t count_ = 0;
};

struct RunStats {
  std::uint64_t seed = 0;
  int horizon = 0;
  std::vector<std::vector<double>> payoffs;  // [round][peer]
  std::vector<double> transfer_volumes;      // per round
  std::vector<double> running_means;         // per peer, after all rounds
  std::vector<double> final_x;
  std::vector<double> final_y;
  bool converged = false;
  int detection_round = 0;    // first round with a published deviation
  double deviation_payoff = 0.0;
  double cooperative_payoff = 0.0;
};

struct BestResponseConfig {
  int grid_points = 200;     // per dimension
  int refinements = 3;       // zoomed passes after the first grid
  double tolerance = 1e-2;   // convergence tolerance as a fraction of x^_beta
};

struct BestResponse {
  double x = 0.0;
  double share_fraction = 0.0;
  double payoff = 0.0;
};

// Grid search over (x, share fraction) in [0, 2 x^_delta] x [0, 1] for
// peer `peer` against fixed (xs, ys) of the others, refined by zooming in
// on the grid winner and on the peer's current play. The current play is
// returned unless strictly beaten.
BestResponse best_response(const CpsParams& params, const Scheme& scheme,
                           std::span<const double> xs,
                           std::span<const double> ys, std::size_t peer,
                           const BestResponseConfig& config = {});

struct InitialPlay {
  double x = 0.0;
  double share_fraction = 0.0;
};

// Each round: play, then one uniformly drawn peer switches to its grid best
// response against that round's play. `converged` reports whether the final
// play matches the scheme's analytic outcome within config.tolerance x^_beta.
RunStats best_response_dynamics(const CpsParams& params, const Scheme& scheme,
                                std::span<const InitialPlay> init, int rounds,
                                std::uint64_t seed,
                                const BestResponseConfig& config = {});

// Everyone plays the grim-trigger strategy on `target`, which must be
// participation efficient. If `deviant` is set, that peer plays its grid
// one-shot best deviation in `deviation_round` (1-based).
RunStats grim_trigger_run(const CpsParams& params, const Allocation& target,
                          std::optional<std::size_t> deviant,
                          int deviation_round, int rounds,
                          const BestResponseConfig& config = {});

}  // namespace cps::sim

#endif  // CPS_SIM_HPP_
