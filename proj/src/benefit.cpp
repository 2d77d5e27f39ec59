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

#include "cps/benefit.hpp"

#include <cmath>
#include <sstream>

#include "cps/error.hpp"

namespace cps {

BenefitSpec log_benefit() {
  BenefitSpec f;
  f.name = "log";
  f.eval = [](double c) { return std::log1p(c); };
  f.deriv = [](double c) { return 1.0 / (1.0 + c); };
  f.deriv_at_zero = 1.0;
  return f;
}

BenefitSpec distinct_files_benefit(const DistinctFilesParams& p) {
  if (!(p.a > 0.0)) {
    throw PreconditionError("distinct_files_benefit: a must be positive");
  }
  if (p.M < 2) {
    throw PreconditionError(
        "distinct_files_benefit: M must be at least 2 (M = 1 makes the "
        "derivative undefined)");
  }
  const double scale = p.a * static_cast<double>(p.M);
  const double log_keep = std::log1p(-1.0 / static_cast<double>(p.M));
  BenefitSpec f;
  f.name = "distinct_files";
  // -expm1(c*log(keep)) = 1 - keep^c without cancellation for small c.
  f.eval = [scale, log_keep](double c) {
    return -scale * std::expm1(c * log_keep);
  };
  f.deriv = [scale, log_keep](double c) {
    return -scale * log_keep * std::exp(c * log_keep);
  };
  f.deriv_at_zero = -scale * log_keep;
  return f;
}

void validate(const BenefitSpec& f) {
  auto fail = [&](const std::string& what) {
    throw PreconditionError("benefit '" + f.name + "': " + what);
  };
  if (!f.eval || !f.deriv) fail("missing evaluator");
  if (!(f.deriv_at_zero > 0.0) || !std::isfinite(f.deriv_at_zero)) {
    fail("f'(0) must be positive and finite");
  }
  if (std::abs(f.eval(0.0)) > 1e-12) fail("f(0) must be 0");
  double prev = f.deriv(0.0);
  // The probe stops once f' is negligible; past that point it may
  // underflow to zero.
  for (double c = 0.01; c < 1e6 && prev > 1e-12 * f.deriv_at_zero; c *= 1.5) {
    const double d = f.deriv(c);
    if (!(d > 0.0)) fail("f' must be positive");
    if (!(d < prev)) fail("f' must be strictly decreasing");
    prev = d;
  }
  if (!(f.deriv(1e9) >= 0.0 && f.deriv(1e9) < 1e-6 * f.deriv_at_zero)) {
    fail("f' must vanish at infinity");
  }
  for (double c1 = 0.0; c1 < 1e4; c1 = 2.0 * c1 + 0.5) {
    const double c2 = 3.0 * c1 + 1.0;
    if (f.eval(0.5 * (c1 + c2)) < 0.5 * (f.eval(c1) + f.eval(c2)) - 1e-12) {
      fail("f must be concave");
    }
  }
}

double maximizer(const BenefitSpec& f, double alpha) {
  if (!(alpha > 0.0)) {
    std::ostringstream os;
    os << "maximizer: alpha must be positive, got " << alpha;
    throw PreconditionError(os.str());
  }
  if (alpha >= f.deriv_at_zero) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (f.deriv(hi) >= alpha) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) {
      throw DivergenceError("maximizer: no bracket for f'(x) = alpha");
    }
  }
  // f'(lo) >= alpha > f'(hi)
  while (hi - lo > kRootTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f.deriv(mid) >= alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double conjugate(const BenefitSpec& f, double alpha) {
  const double x = maximizer(f, alpha);
  return f.eval(x) - alpha * x;
}

}  // namespace cps
