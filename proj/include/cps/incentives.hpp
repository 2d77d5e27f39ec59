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

#ifndef CPS_INCENTIVES_HPP_
#define CPS_INCENTIVES_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "cps/game.hpp"

namespace cps {

// Uniform linear pricing: t_i = p (u_i - d_i). Budget balanced for any Z.
struct LinearPrice {
  double p = 0.0;

  double payment(const TransferMatrix& z, std::size_t peer) const;
  std::vector<double> payments(const TransferMatrix& z) const;
};

// Download-cost surcharge q(r) = p* [1 - r]^+ keyed on the upload/download
// ratio r.
struct InterventionFn {
  double p_star = 0.0;

  double operator()(double rating) const;
};

// r_i = u_i / d_i, or +inf when peer i downloads nothing.
double rating(const TransferMatrix& z, std::size_t peer);

// p* = [kappa + (N-1) sigma - delta] / N.
double optimal_price(const CpsParams& params);

struct PricedResponse {
  double x = 0.0;
  double d = 0.0;
};

// Solution of a peer's decoupled problem under (possibly peer-specific)
// download prices: whichever of download (p_i + delta) or production
// (kappa + (N-1) sigma - sum_{j != i} p_j) is cheaper is used exclusively.
// At the knife edge the symmetric point x = x^/N, d = (N-1) x^/N is
// returned. Throws PreconditionError if the cheaper cost is nonpositive
// (the problem is unbounded).
PricedResponse priced_best_response(const CpsParams& params,
                                    std::span<const double> prices,
                                    std::size_t peer);

struct MarketPoint {
  double price = 0.0;
  double demand = 0.0;
  double supply = 0.0;
  double excess = 0.0;
};

// Aggregate demand D(p), supply S(p) and excess demand under a uniform
// price. Supply is +inf once kappa - (N-1)(p - sigma) <= 0.
MarketPoint market_point(const CpsParams& params, double p);

struct MarketCurves {
  double p_star = 0.0;
  std::vector<MarketPoint> points;
};

MarketCurves market_curves(const CpsParams& params,
                           std::span<const double> price_grid);

// D(p) - S(p) assembled from every peer's priced_best_response, with
// S = (N-1) sum x_i. Agrees with market_point wherever both are finite.
double excess_demand_from_responses(const CpsParams& params, double p);

struct PriceTrajectory {
  std::vector<double> prices;
  bool converged = false;
};

// Forward-Euler integration of dp/dt = eta ED(p). Each move is capped at
// half the current price and the Euler step is halved whenever ED changes
// sign, so the discontinuous right-hand side does not chatter. Stops once
// |p - p*| < 1e-6. Throws DivergenceError if p leaves (0, 10 f'(0)].
PriceTrajectory run_price_adjustment(const CpsParams& params, double p0,
                                     double eta, double step, int max_iters);

inline constexpr double kPriceTolerance = 1e-6;

struct QuantityState {
  std::vector<double> x;
  std::vector<double> d;
};

struct QuantityTrajectory {
  std::vector<QuantityState> states;
  bool converged = false;
};

// Forward-Euler integration of dx_i/dt = -dd_i/dt = eta_i (d_i - sum_{j!=i}
// x_j) under the optimal price. A peer at x_i = 0 facing excess supply stops
// adjusting. Stops once |sum x - x_beta| < 1e-6. An empty d0 means
// d0_i = x_beta - x0_i; otherwise x0_i + d0_i must equal x_beta.
QuantityTrajectory run_quantity_adjustment(const CpsParams& params,
                                           std::span<const double> x0,
                                           std::span<const double> eta,
                                           double step, int max_iters,
                                           std::span<const double> d0 = {});

inline constexpr double kQuantityTolerance = 1e-6;

enum class MisreportSide { kLow, kHigh };

// Payoff of a peer that stalls the price process at `stalled_price` by
// misreporting, others truthful. kLow needs p' < p*; kHigh needs p'' > p*
// and N = 2, since with N > 2 one peer cannot zero the excess demand above
// p*.
double misreport_payoff(const CpsParams& params, double stalled_price,
                        MisreportSide side);

// pi_i = v_i - q(r_i) d_i.
double intervention_payoff(const CpsParams& params, const Allocation& alloc,
                           const InterventionFn& q, std::size_t peer);

struct InterventionOutcome {
  SolutionReport report;
  double p_star = 0.0;
  std::vector<double> ratings;
  std::vector<double> levels;   // q*(r_i)
  std::vector<double> payoffs;  // pi_i
};

InterventionOutcome intervention_outcome(const CpsParams& params);

// PE structure (within 1e-6) and v_i >= f*(kappa) for every peer.
bool check_participation_efficient(const CpsParams& params,
                                   const Allocation& alloc);

}  // namespace cps

#endif  // CPS_INCENTIVES_HPP_
