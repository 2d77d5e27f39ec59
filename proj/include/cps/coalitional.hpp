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

#ifndef CPS_COALITIONAL_HPP_
#define CPS_COALITIONAL_HPP_

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cps/game.hpp"

namespace cps {

// A subset of {0, ..., N-1} for N <= 63, stored as a bitmask.
class Coalition {
 public:
  constexpr Coalition() = default;
  constexpr explicit Coalition(std::uint64_t bits) : bits_(bits) {}
  static Coalition of(std::initializer_list<int> members);
  static Coalition of(std::span<const int> members);
  static constexpr Coalition grand(int n) {
    return Coalition(n >= 64 ? ~std::uint64_t{0}
                             : (std::uint64_t{1} << n) - 1);
  }

  constexpr std::uint64_t bits() const { return bits_; }
  int size() const;
  constexpr bool contains(int i) const { return (bits_ >> i) & 1U; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr Coalition with(int i) const {
    return Coalition(bits_ | (std::uint64_t{1} << i));
  }
  std::vector<int> members() const;
  std::string to_string() const;  // "{0,2,5}"

  friend constexpr bool operator==(Coalition, Coalition) = default;

 private:
  std::uint64_t bits_ = 0;
};

// A transferable-utility game on N players.
struct CoalitionValueFn {
  int n_peers = 0;
  std::function<double(Coalition)> value;

  double operator()(Coalition s) const { return s.empty() ? 0.0 : value(s); }
};

// Tables indexed by group size n = 1..n_max; slot 0 is unused (G(0) = 0).
struct ScaleTables {
  int n_max = 0;
  std::vector<double> beta_tilde;
  std::vector<double> gamma_tilde;
  std::vector<double> g;     // f*(beta_tilde(n))
  std::vector<double> G;     // n g(n)
  std::vector<double> mp;    // G(n) - G(n-1)
  std::vector<double> g_fs;  // average utility under enforced full sharing
};

ScaleTables scale_tables(const CpsParams& params, int n_max);

// g^FS(n) = f(x~) - beta~(n) x~ with x~ the maximizer at gamma~(n).
double full_sharing_average(const CpsParams& params, int n);

// v(S) = |S| f*(beta~(|S|)) on params.n_peers players.
CoalitionValueFn coalition_game(const CpsParams& params);

std::vector<double> shapley(const CpsParams& params);

// All permutations of (MP(1), ..., MP(N)). Limited to N <= 8.
std::vector<std::vector<double>> core_vertices(const CpsParams& params);

inline constexpr int kMaxVertexPeers = 8;

// Right-hand side of the core production bound for a coalition of size s:
// s (f(x_beta) - delta x_beta - f*(beta~(s))) / (kappa + (N-1) sigma - delta).
double core_production_bound(const CpsParams& params, int s);

// Inverts the PE utility map v_i = f(x_beta) - delta x_beta - c x_i, giving
// the production profile that yields the utility profile `v`.
std::vector<double> production_for_utilities(const CpsParams& params,
                                             std::span<const double> v);

struct CoreCheck {
  bool in_core = true;
  std::optional<Coalition> violating;
};

// Core membership of the PE allocation with production profile x. Checks
// the s largest producers for every s = 1..N. Requires sum(x) = x_beta
// within 1e-6.
CoreCheck is_in_core(const CpsParams& params, std::span<const double> x);

// Largest individual production compatible with the participation
// constraint at PE. Requires N >= 2.
double participation_bound(const CpsParams& params);

struct GroupSizeResult {
  int n_star = 1;
  int search_limit = 1;   // floor((f'(0) - kappa)/sigma + 1)
  double value = 0.0;     // g^FS(n_star)
  bool tie = false;
  std::vector<int> tied;  // every n attaining the maximum when tie
};

GroupSizeResult optimal_group_size(const CpsParams& params);

// v^FS for a coalition of `size` peers that splits into groups of n_star
// plus one residual group of size mod n_star.
double full_sharing_coalition_value(const CpsParams& params, int n_star,
                                    int size);

CoalitionValueFn full_sharing_game(const CpsParams& params, int total_n);

struct VfsCore {
  bool empty = false;
  int n_star = 1;
  std::vector<double> profile;            // the unique element when !empty
  std::vector<double> tested_profile;     // the profile blocked when empty
  std::optional<Coalition> blocking;      // witness when empty
};

// Core of v^FS on total_n peers. Requires N* < total_n.
VfsCore vfs_core(const CpsParams& params, int total_n);

}  // namespace cps

#endif  // CPS_COALITIONAL_HPP_
