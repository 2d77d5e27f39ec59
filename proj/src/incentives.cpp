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

#include "cps/incentives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "cps/benefit.hpp"
#include "cps/error.hpp"

namespace cps {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kKnifeEdge = 1e-10;

// x^_alpha with the convention x^_alpha = +inf for alpha <= 0.
double maximizer_or_inf(const BenefitSpec& f, double alpha) {
  return alpha <= 0.0 ? kInf : maximizer(f, alpha);
}

}  // namespace

double LinearPrice::payment(const TransferMatrix& z, std::size_t peer) const {
  return p * (z.upload(peer) - z.download(peer));
}

std::vector<double> LinearPrice::payments(const TransferMatrix& z) const {
  std::vector<double> t(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) t[i] = payment(z, i);
  return t;
}

double InterventionFn::operator()(double rating) const {
  return p_star * std::max(1.0 - rating, 0.0);
}

double rating(const TransferMatrix& z, std::size_t peer) {
  const double d = z.download(peer);
  return d == 0.0 ? kInf : z.upload(peer) / d;
}

double optimal_price(const CpsParams& params) {
  validate(params);
  const double n = params.n_peers;
  return (params.kappa + (n - 1.0) * params.sigma - params.delta) / n;
}

PricedResponse priced_best_response(const CpsParams& params,
                                    std::span<const double> prices,
                                    std::size_t peer) {
  validate(params);
  const auto n = static_cast<std::size_t>(params.n_peers);
  if (prices.size() != n || peer >= n) {
    throw PreconditionError("priced_best_response: need one price per peer");
  }
  for (double p : prices) {
    if (!(p >= 0.0)) throw PreconditionError("prices must be nonnegative");
  }
  const double sum = std::accumulate(prices.begin(), prices.end(), 0.0);
  const double threshold =
      params.kappa + static_cast<double>(n - 1) * params.sigma - params.delta;
  const double download_cost = prices[peer] + params.delta;
  const double produce_cost = params.kappa +
                              static_cast<double>(n - 1) * params.sigma -
                              (sum - prices[peer]);
  if (std::min(download_cost, produce_cost) <= 0.0) {
    std::ostringstream os;
    os << "priced_best_response: effective cost "
       << std::min(download_cost, produce_cost)
       << " <= 0 makes the peer's problem unbounded";
    throw PreconditionError(os.str());
  }
  PricedResponse r;
  if (std::abs(sum - threshold) <= kKnifeEdge) {
    const double total = maximizer(params.benefit, download_cost);
    r.x = total / static_cast<double>(n);
    r.d = total - r.x;
  } else if (sum < threshold) {
    r.d = maximizer(params.benefit, download_cost);
  } else {
    r.x = maximizer(params.benefit, produce_cost);
  }
  return r;
}

MarketPoint market_point(const CpsParams& params, double p) {
  validate(params);
  const double n = params.n_peers;
  const double p_star = optimal_price(params);
  MarketPoint m;
  m.price = p;
  if (std::abs(p - p_star) * n <= kKnifeEdge) {
    const double xb = maximizer(params.benefit, p_star + params.delta);
    m.demand = (n - 1.0) * xb;
    m.supply = m.demand;
  } else if (p < p_star) {
    m.demand = n * maximizer_or_inf(params.benefit, p + params.delta);
  } else if (params.n_peers > 1) {
    m.supply = n * (n - 1.0) *
               maximizer_or_inf(params.benefit,
                                params.kappa - (n - 1.0) * (p - params.sigma));
  }
  m.excess = m.demand - m.supply;
  return m;
}

MarketCurves market_curves(const CpsParams& params,
                           std::span<const double> price_grid) {
  MarketCurves c;
  c.p_star = optimal_price(params);
  c.points.reserve(price_grid.size());
  for (double p : price_grid) {
    if (!(p > 0.0)) throw PreconditionError("market_curves: prices must be > 0");
    c.points.push_back(market_point(params, p));
  }
  return c;
}

double excess_demand_from_responses(const CpsParams& params, double p) {
  const auto n = static_cast<std::size_t>(params.n_peers);
  const std::vector<double> prices(n, p);
  double demand = 0.0;
  double produced = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = priced_best_response(params, prices, i);
    demand += r.d;
    produced += r.x;
  }
  return demand - static_cast<double>(n - 1) * produced;
}

PriceTrajectory run_price_adjustment(const CpsParams& params, double p0,
                                     double eta, double step, int max_iters) {
  validate(params);
  if (!(p0 > 0.0) || !(eta > 0.0) || !(step > 0.0) || max_iters < 0) {
    throw PreconditionError(
        "run_price_adjustment: p0, eta and step must be positive");
  }
  const double p_star = optimal_price(params);
  const double ceiling = 10.0 * params.benefit.deriv_at_zero;
  PriceTrajectory t;
  t.prices.push_back(p0);
  double p = p0;
  double h = step;
  int last_sign = 0;
  for (int it = 0; it < max_iters; ++it) {
    if (std::abs(p - p_star) < kPriceTolerance) break;
    const double ed = market_point(params, p).excess;
    const int sign = (ed > 0.0) - (ed < 0.0);
    if (sign == 0) break;
    if (last_sign != 0 && sign != last_sign) h *= 0.5;
    last_sign = sign;
    double move = h * eta * ed;
    const double cap = 0.5 * p;
    if (std::abs(move) > cap) move = sign * cap;
    p += move;
    t.prices.push_back(p);
    if (!(p > 0.0) || p > ceiling) {
      std::ostringstream os;
      os << "run_price_adjustment: price " << p << " left (0, " << ceiling
         << "] at iteration " << it + 1;
      throw DivergenceError(os.str());
    }
  }
  t.converged = std::abs(p - p_star) < kPriceTolerance;
  return t;
}

QuantityTrajectory run_quantity_adjustment(const CpsParams& params,
                                           std::span<const double> x0,
                                           std::span<const double> eta,
                                           double step, int max_iters,
                                           std::span<const double> d0) {
  validate(params);
  const auto n = static_cast<std::size_t>(params.n_peers);
  if (x0.size() != n || eta.size() != n) {
    throw PreconditionError("run_quantity_adjustment: need x0 and eta per peer");
  }
  if (!d0.empty() && d0.size() != n) {
    throw PreconditionError("run_quantity_adjustment: need d0 per peer");
  }
  if (!(step > 0.0)) throw PreconditionError("run_quantity_adjustment: step <= 0");
  const double xb = maximizer(params.benefit, beta_tilde(params, params.n_peers));
  const double tol = 1e-9 * std::max(1.0, xb);
  QuantityState s;
  s.x.assign(x0.begin(), x0.end());
  s.d.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(eta[i] > 0.0)) throw PreconditionError("eta_i must be positive");
    s.d[i] = d0.empty() ? xb - s.x[i] : d0[i];
    if (!(s.x[i] >= 0.0) || !(s.d[i] >= -tol) ||
        std::abs(s.x[i] + s.d[i] - xb) > tol) {
      std::ostringstream os;
      os << "run_quantity_adjustment: peer " << i << " starts at x + d = "
         << s.x[i] + s.d[i] << " (need x >= 0, d >= 0, x + d = x_beta = "
         << xb << ")";
      throw PreconditionError(os.str());
    }
    s.d[i] = std::max(s.d[i], 0.0);
  }
  QuantityTrajectory t;
  t.states.push_back(s);
  auto gap = [&](const QuantityState& q) {
    return std::accumulate(q.x.begin(), q.x.end(), 0.0) - xb;
  };
  const double initial_gap = std::abs(gap(s));
  for (int it = 0; it < max_iters; ++it) {
    if (std::abs(gap(s)) < kQuantityTolerance) break;
    const double total = std::accumulate(s.x.begin(), s.x.end(), 0.0);
    QuantityState next = s;
    for (std::size_t i = 0; i < n; ++i) {
      const double excess = s.d[i] - (total - s.x[i]);
      if (s.x[i] <= 0.0 && excess < 0.0) continue;
      const double dx = step * eta[i] * excess;
      const double x = std::clamp(s.x[i] + dx, 0.0, s.x[i] + s.d[i]);
      next.d[i] = s.d[i] - (x - s.x[i]);
      next.x[i] = x;
    }
    s = std::move(next);
    t.states.push_back(s);
    if (std::abs(gap(s)) > 10.0 * initial_gap + 1.0) {
      throw DivergenceError(
          "run_quantity_adjustment: total production diverged; reduce step");
    }
  }
  t.converged = std::abs(gap(s)) < kQuantityTolerance;
  return t;
}

double misreport_payoff(const CpsParams& params, double stalled_price,
                        MisreportSide side) {
  validate(params);
  const double n = params.n_peers;
  const double p_star = optimal_price(params);
  const auto& f = params.benefit;
  if (side == MisreportSide::kLow) {
    if (!(stalled_price < p_star) || !(stalled_price >= 0.0)) {
      throw PreconditionError("misreport_payoff: low side needs 0 <= p' < p*");
    }
    const double x = maximizer(f, stalled_price + params.delta);
    const double produce_cost =
        params.kappa - (n - 1.0) * (stalled_price - params.sigma);
    return f.eval(x) - produce_cost * x;
  }
  if (!(stalled_price > p_star)) {
    throw PreconditionError("misreport_payoff: high side needs p'' > p*");
  }
  if (params.n_peers != 2) {
    throw PreconditionError(
        "misreport_payoff: with N > 2 one peer alone cannot make the excess "
        "demand vanish above p*, so the high side needs N = 2");
  }
  const double alpha = params.kappa - (n - 1.0) * (stalled_price - params.sigma);
  if (!(alpha > 0.0)) {
    throw PreconditionError(
        "misreport_payoff: stalled price makes production free (unbounded)");
  }
  const double d = maximizer(f, alpha);
  return f.eval(d) - (stalled_price + params.delta) * d;
}

double intervention_payoff(const CpsParams& params, const Allocation& alloc,
                           const InterventionFn& q, std::size_t peer) {
  const double v = utility(params, alloc, peer);
  return v - q(rating(alloc.z, peer)) * alloc.z.download(peer);
}

InterventionOutcome intervention_outcome(const CpsParams& params) {
  validate(params);
  if (params.n_peers < 2) {
    throw PreconditionError("intervention_outcome: requires N >= 2");
  }
  InterventionOutcome out;
  out.report = solve_pareto(params);
  out.p_star = optimal_price(params);
  const InterventionFn q{out.p_star};
  const auto& a = out.report.allocation;
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.ratings.push_back(rating(a.z, i));
    out.levels.push_back(q(out.ratings.back()));
    out.payoffs.push_back(intervention_payoff(params, a, q, i));
  }
  return out;
}

bool check_participation_efficient(const CpsParams& params,
                                   const Allocation& alloc) {
  validate(params);
  check_feasible(alloc);
  const std::size_t n = alloc.size();
  if (n != static_cast<std::size_t>(params.n_peers)) return false;
  constexpr double tol = 1e-6;
  const double xb = maximizer(params.benefit, beta_tilde(params, params.n_peers));
  const double total = std::accumulate(alloc.x.begin(), alloc.x.end(), 0.0);
  if (std::abs(total - xb) > tol) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(alloc.y[i] - alloc.x[i]) > tol) return false;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && std::abs(alloc.z(j, i) - alloc.x[i]) > tol) return false;
    }
  }
  const double reservation = conjugate(params.benefit, params.kappa);
  for (std::size_t i = 0; i < n; ++i) {
    if (utility(params, alloc, i) < reservation - 1e-12) return false;
  }
  return true;
}

}  // namespace cps
