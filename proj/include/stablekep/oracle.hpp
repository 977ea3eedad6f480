// Copyright 2026 The StableKEP Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef STABLEKEP_ORACLE_HPP_
#define STABLEKEP_ORACLE_HPP_

#include <functional>
#include <optional>
#include <vector>

#include "stablekep/enumerate.hpp"
#include "stablekep/formulations.hpp"
#include "stablekep/instance.hpp"
#include "stablekep/rational.hpp"
#include "stablekep/stability.hpp"

namespace stablekep {

inline constexpr int kOracleCycleLimit = 25;

// Calls `visit` once for every set of pairwise vertex-disjoint cycles
// (the empty set included). Throws GuardExceeded above kOracleCycleLimit.
void for_each_exchange(const Instance& instance, const std::vector<Cycle>& cycles,
                       const std::function<void(const Exchange&)>& visit);
std::vector<Exchange> all_exchanges(const Instance& instance, const std::vector<Cycle>& cycles);

// Whether `exchange` satisfies the mode (always true for kUnconstrained).
bool satisfies_mode(const Instance& instance, const std::vector<Cycle>& cycles,
                    const Exchange& exchange, StabilityMode mode);

// Number of cycles the mode counts against an exchange: blocking cycles for
// kStable, weakly blocking for the strong modes, 0 for kUnconstrained.
int blocking_count(const Instance& instance, const std::vector<Cycle>& cycles,
                   const Exchange& exchange, StabilityMode mode);

struct OracleOptimum {
  int objective = 0;
  // nullopt when no exchange satisfies the mode.
  std::optional<Exchange> witness;
};

OracleOptimum oracle_optimum(const Instance& instance, const std::vector<Cycle>& cycles,
                             StabilityMode mode);

struct OracleMinBlocking {
  int blocking = 0;
  int transplants = 0;
  Exchange witness;
};

// Among exchanges with at least ceil(m_star - budget) transplants, the
// fewest counted cycles, ties broken by more transplants.
OracleMinBlocking oracle_min_blocking(const Instance& instance, const std::vector<Cycle>& cycles,
                                      StabilityMode mode, const Rational& budget, int m_star);

}  // namespace stablekep

#endif  // STABLEKEP_ORACLE_HPP_
