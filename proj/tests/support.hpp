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

// Hand-built fixtures and a dense random pool builder shared by the tests.

#ifndef STABLEKEP_TESTS_SUPPORT_HPP_
#define STABLEKEP_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stablekep/enumerate.hpp"
#include "stablekep/formulations.hpp"
#include "stablekep/instance.hpp"
#include "stablekep/stability.hpp"

namespace stablekep::testing {

struct RankedArc {
  VertexId from;
  VertexId to;
  int rank;
};

// Adds dummy arcs (rank by pair id) from every pair into every NDD.
inline Instance make_instance(int num_pairs, int num_ndds, const std::vector<RankedArc>& arcs,
                              int k, int l, PreferenceMode mode) {
  std::vector<VertexKind> kinds(num_pairs, VertexKind::kPair);
  kinds.insert(kinds.end(), num_ndds, VertexKind::kNdd);
  std::vector<Arc> all;
  for (const auto& a : arcs) all.push_back(Arc{a.from, a.to, a.rank, std::nullopt, false});
  for (int n = num_pairs; n < num_pairs + num_ndds; ++n) {
    for (int p = 0; p < num_pairs; ++p) all.push_back(Arc{p, n, p + 1, std::nullopt, true});
  }
  return Instance(std::move(kinds), std::move(all), k, l, mode);
}

// i=0 <-> j=1.
inline Instance two_cycle(int k = 2) {
  return make_instance(2, 0, {{0, 1, 1}, {1, 0, 1}}, k, 2, PreferenceMode::kStrict);
}

// Ranked star: j=0 receives from a=1 (rank 1),
// b=2 and c=3 (rank 2), d=4 (rank 3); j gives back to a and d.
inline constexpr VertexId kStarJ = 0, kStarA = 1, kStarB = 2, kStarC = 3, kStarD = 4;
inline Instance ranked_star() {
  return make_instance(5, 0,
                       {{kStarA, kStarJ, 1},
                        {kStarB, kStarJ, 2},
                        {kStarC, kStarJ, 2},
                        {kStarD, kStarJ, 3},
                        {kStarJ, kStarA, 1},
                        {kStarJ, kStarD, 1}},
                       2, 2, PreferenceMode::kWeak);
}

// Ties example: a=0, i=1, j=2, b=3 with 2-cycles (a,i), (i,j), (j,b) and
// every rank equal.
inline constexpr VertexId kTiesA = 0, kTiesI = 1, kTiesJ = 2, kTiesB = 3;
inline Instance tied_pairs() {
  return make_instance(4, 0,
                       {{kTiesA, kTiesI, 1},
                        {kTiesI, kTiesA, 1},
                        {kTiesI, kTiesJ, 1},
                        {kTiesJ, kTiesI, 1},
                        {kTiesJ, kTiesB, 1},
                        {kTiesB, kTiesJ, 1}},
                       2, 2, PreferenceMode::kWeak);
}

inline int cycle_index(const std::vector<Cycle>& cycles, std::vector<VertexId> vertices) {
  for (int c = 0; c < static_cast<int>(cycles.size()); ++c) {
    if (cycles[c].vertices == vertices) return c;
  }
  return -1;
}

// Complete digraph on n pairs with strict ranks by donor id.
inline Instance complete_pairs(int n, int k) {
  std::vector<RankedArc> arcs;
  for (int to = 0; to < n; ++to) {
    int r = 1;
    for (int from = 0; from < n; ++from) {
      if (from != to) arcs.push_back({from, to, r++});
    }
  }
  return make_instance(n, 0, arcs, k, 2, PreferenceMode::kStrict);
}

// Random pool with independent arc draws. Strict ranks are a random
// permutation per vertex; weak ranks are drawn from {1..m} and densified.
inline Instance random_instance(std::uint64_t seed, int num_pairs, int num_ndds, double density,
                                PreferenceMode mode, int k, int l) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution arc(density);
  std::vector<std::vector<VertexId>> into(num_pairs);
  const int n = num_pairs + num_ndds;
  for (VertexId from = 0; from < n; ++from) {
    for (VertexId to = 0; to < num_pairs; ++to) {
      if (from != to && arc(rng)) into[to].push_back(from);
    }
  }
  std::vector<RankedArc> arcs;
  for (VertexId to = 0; to < num_pairs; ++to) {
    auto& list = into[to];
    std::shuffle(list.begin(), list.end(), rng);
    if (mode == PreferenceMode::kStrict) {
      for (int r = 0; r < static_cast<int>(list.size()); ++r) arcs.push_back({list[r], to, r + 1});
    } else {
      std::uniform_int_distribution<int> level(1, std::max<int>(1, (static_cast<int>(list.size()) + 1) / 2));
      std::vector<int> raw;
      for (std::size_t q = 0; q < list.size(); ++q) raw.push_back(level(rng));
      std::vector<int> sorted = raw;
      std::sort(sorted.begin(), sorted.end());
      sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
      for (std::size_t q = 0; q < list.size(); ++q) {
        const int dense = 1 + static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), raw[q]) -
                                               sorted.begin());
        arcs.push_back({list[q], to, dense});
      }
    }
  }
  std::vector<VertexKind> kinds(num_pairs, VertexKind::kPair);
  kinds.insert(kinds.end(), num_ndds, VertexKind::kNdd);
  std::vector<Arc> all;
  for (const auto& a : arcs) all.push_back(Arc{a.from, a.to, a.rank, std::nullopt, false});
  for (VertexId nd = num_pairs; nd < n; ++nd) {
    std::vector<VertexId> donors(num_pairs);
    for (int p = 0; p < num_pairs; ++p) donors[p] = p;
    std::shuffle(donors.begin(), donors.end(), rng);
    for (int r = 0; r < num_pairs; ++r) {
      const int rank = mode == PreferenceMode::kStrict ? r + 1 : 1 + r / 2;
      all.push_back(Arc{donors[r], nd, rank, std::nullopt, true});
    }
  }
  return Instance(std::move(kinds), std::move(all), k, l, mode);
}

// Donor each vertex receives from under an exchange, straight from the
// cycle arcs.
inline std::map<VertexId, VertexId> donors_of(const std::vector<Cycle>& cycles,
                                              const Exchange& ex) {
  std::map<VertexId, VertexId> donor;
  for (int c : ex.cycle_indices) {
    for (const auto& [from, to] : cycles[c].arcs()) donor[to] = from;
  }
  return donor;
}

// Blocking by definition: every vertex of c is unmatched or strictly
// prefers its donor in c.
inline bool blocks_by_definition(const Instance& inst, const std::vector<Cycle>& cycles,
                                 const Exchange& ex, int c) {
  const auto donor = donors_of(cycles, ex);
  for (const auto& [from, to] : cycles[c].arcs()) {
    auto it = donor.find(to);
    if (it == donor.end()) continue;
    if (!(inst.rank(from, to) < inst.rank(it->second, to))) return false;
  }
  return true;
}

// Weak blocking by definition: c is outside the exchange, every vertex is
// unmatched or weakly prefers c, and at least one is unmatched or strictly
// prefers c.
inline bool weakly_blocks_by_definition(const Instance& inst, const std::vector<Cycle>& cycles,
                                        const Exchange& ex, int c) {
  if (std::find(ex.cycle_indices.begin(), ex.cycle_indices.end(), c) != ex.cycle_indices.end()) {
    return false;
  }
  const auto donor = donors_of(cycles, ex);
  bool strict = false;
  for (const auto& [from, to] : cycles[c].arcs()) {
    auto it = donor.find(to);
    if (it == donor.end()) {
      strict = true;
      continue;
    }
    const int mine = inst.rank(from, to);
    const int now = inst.rank(it->second, to);
    if (mine > now) return false;
    if (mine < now) strict = true;
  }
  return strict;
}

// The 0/1 point of a model that encodes an exchange.
inline std::vector<Rational> encode(const Instance& inst, const std::vector<Cycle>& cycles,
                             const BuildArtifacts& art, const Exchange& ex) {
  std::vector<Rational> x(art.model.num_variables(), 0);
  for (int c : ex.cycle_indices) {
    if (art.cycle_var.size() > 0 && art.cycle_var[c] >= 0) x[art.cycle_var[c]] = 1;
    for (const auto& [from, to] : cycles[c].arcs()) {
      const int a = *inst.find_arc(from, to);
      if (!art.arc_var.empty() && art.arc_var[a] >= 0) x[art.arc_var[a]] = 1;
      if (art.formulation == Formulation::kEdge) {
        const auto& split = cycles[c].kind == CycleKind::kPairCycle ? art.arc_cycle_var
                                                                    : art.arc_chain_var;
        if (split[a] < 0) throw std::logic_error("arc without a split variable");
        x[split[a]] = 1;
      }
    }
  }
  return x;
}

}  // namespace stablekep::testing

#endif  // STABLEKEP_TESTS_SUPPORT_HPP_
