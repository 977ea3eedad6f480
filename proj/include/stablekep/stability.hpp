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

#ifndef STABLEKEP_STABILITY_HPP_
#define STABLEKEP_STABILITY_HPP_

#include <optional>
#include <string>
#include <vector>

#include "stablekep/enumerate.hpp"
#include "stablekep/instance.hpp"

namespace stablekep {

// A set of cycles, given as indices into the cycle list.
struct Exchange {
  std::vector<int> cycle_indices;

  friend bool operator==(const Exchange&, const Exchange&) = default;
};

// Sorts and deduplicates the indices.
Exchange make_exchange(std::vector<int> cycle_indices);

int transplants(const std::vector<Cycle>& cycles, const Exchange& exchange);

// True iff the selected cycles are pairwise vertex-disjoint. Throws
// InvalidArgument for an out-of-range index.
bool check_feasible(const Instance& instance, const std::vector<Cycle>& cycles,
                    const Exchange& exchange);

// For each vertex, the donor it receives from in the exchange (its matched
// in-arc), or nullopt when unmatched. Throws InvalidArgument if the exchange
// is infeasible.
std::vector<std::optional<VertexId>> matched_in_arcs(const Instance& instance,
                                                     const std::vector<Cycle>& cycles,
                                                     const Exchange& exchange);

// Cycles c such that no arc (i,j) of c has a matched in-arc (k,j) with
// rank(k,j) <= rank(i,j). Unmatched vertices never provide such an arc.
std::vector<int> find_blocking(const Instance& instance, const std::vector<Cycle>& cycles,
                               const Exchange& exchange);

// Cycles c outside the exchange for which neither escape holds:
//  (a) every vertex of c is matched at the same rank as its in-arc in c;
//  (b) some vertex of c is matched strictly better than its in-arc in c.
// Under strict preferences (a) only holds for cycles in the exchange.
std::vector<int> find_weakly_blocking(const Instance& instance, const std::vector<Cycle>& cycles,
                                      const Exchange& exchange);

struct StabilityReport {
  bool feasible = true;
  int transplants = 0;
  std::vector<int> blocking;
  std::vector<int> weakly_blocking;
  bool is_stable() const { return feasible && blocking.empty(); }
  bool is_strongly_stable() const { return feasible && weakly_blocking.empty(); }
};

// Full census. An infeasible exchange yields feasible=false and empty lists.
StabilityReport verify(const Instance& instance, const std::vector<Cycle>& cycles,
                       const Exchange& exchange);

std::string to_json(const StabilityReport& report);

// (m_star - m_s) / m_star * 100.
double price_of_stability(int m_star, int m_s);

}  // namespace stablekep

#endif  // STABLEKEP_STABILITY_HPP_
