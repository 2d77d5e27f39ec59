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

#ifndef CPS_ERROR_HPP_
#define CPS_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace cps {

// A caller violated an operation's precondition (bad parameters, infeasible
// allocation, hypothesis of a result not met). The message names the
// violated constraint.
class PreconditionError : public std::invalid_argument {
 public:
  explicit PreconditionError(const std::string& what)
      : std::invalid_argument(what) {}
};

// A numerical process left its admissible region (e.g. a price trajectory
// that went nonpositive).
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& what)
      : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cps

#endif  // CPS_ERROR_HPP_
