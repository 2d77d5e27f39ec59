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

#ifndef CPS_BENEFIT_HPP_
#define CPS_BENEFIT_HPP_

#include <functional>
#include <string>

namespace cps {

// A concave benefit of consumption f: R+ -> R+ with f(0) = 0, f' > 0,
// f'' < 0, finite right derivative at zero and f'(c) -> 0 as c -> inf.
// Supplied as an evaluator pair; nothing here differentiates symbolically.
struct BenefitSpec {
  std::string name;
  std::function<double(double)> eval;
  std::function<double(double)> deriv;
  double deriv_at_zero = 0.0;

  double operator()(double c) const { return eval(c); }
};

struct DistinctFilesParams {
  double a = 1.0;  // benefit per distinct file
  long M = 1;      // number of producible files
};

// f(c) = ln(1 + c).
BenefitSpec log_benefit();

// Expected number of distinct files among c draws with replacement from M
// files, scaled by a: f(c) = aM[1 - (1 - 1/M)^c]. M = 1 is rejected.
BenefitSpec distinct_files_benefit(const DistinctFilesParams& p);

// Checks the structural assumptions on a benefit (f(0)=0, positive and
// decreasing derivative on a probe grid, vanishing derivative far out,
// midpoint concavity). Throws PreconditionError naming the first failure.
void validate(const BenefitSpec& f);

// The unique x >= 0 with f'(x) = alpha when alpha <= f'(0), else 0. This is
// the maximizer of f(x) - alpha*x over x >= 0 in both cases. Bisection on
// f' to an absolute root tolerance of 1e-10.
double maximizer(const BenefitSpec& f, double alpha);

// f*(alpha) = sup_{x >= 0} f(x) - alpha*x, evaluated at maximizer(f, alpha).
double conjugate(const BenefitSpec& f, double alpha);

inline constexpr double kRootTolerance = 1e-10;

}  // namespace cps

#endif  // CPS_BENEFIT_HPP_
