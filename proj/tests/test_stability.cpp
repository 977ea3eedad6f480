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

#include <algorithm>
#include <vector>

#include "doctest.h"
#include "stablekep/enumerate.hpp"
#include "stablekep/errors.hpp"
#include "stablekep/oracle.hpp"
#include "stablekep/stability.hpp"
#include "support.hpp"

using namespace stablekep;
using namespace stablekep::testing;

namespace {

bool contains(const std::vector<int>& list, int x) {
  return std::find(list.begin(), list.end(), x) != list.end();
}

// Verifier against the definitions, over every exchange of the instance.
void check_against_definitions(const Instance& inst) {
  const auto cycles = enumerate_cycles(inst);
  if (static_cast<int>(cycles.size()) > kOracleCycleLimit) return;
  for_each_exchange(inst, cycles, [&](const Exchange& ex) {
    const auto blocking = find_blocking(inst, cycles, ex);
    const auto weakly = find_weakly_blocking(inst, cycles, ex);
    for (int c = 0; c < static_cast<int>(cycles.size()); ++c) {
      CHECK(contains(blocking, c) == blocks_by_definition(inst, cycles, ex, c));
      CHECK(contains(weakly, c) == weakly_blocks_by_definition(inst, cycles, ex, c));
    }
    for (int c : blocking) CHECK(contains(weakly, c));
    for (int c : ex.cycle_indices) {
      CHECK_FALSE(contains(blocking, c));
      CHECK_FALSE(contains(weakly, c));
    }
    const StabilityReport r = verify(inst, cycles, ex);
    CHECK(r.feasible);
    CHECK(r.blocking == blocking);
    CHECK(r.weakly_blocking == weakly);
    CHECK(r.transplants == transplants(cycles, ex));
  });
}

}  // namespace

TEST_SUITE("stability") {

TEST_CASE("feasibility") {
  const Instance f2 = tied_pairs();
  const auto cycles = enumerate_cycles(f2);
  const int ai = cycle_index(cycles, {kTiesA, kTiesI});
  const int ij = cycle_index(cycles, {kTiesI, kTiesJ});
  const int jb = cycle_index(cycles, {kTiesJ, kTiesB});
  CHECK(check_feasible(f2, cycles, Exchange{}));
  CHECK(check_feasible(f2, cycles, make_exchange({ai, jb})));
  CHECK_FALSE(check_feasible(f2, cycles, make_exchange({ai, ij})));
  CHECK_FALSE(check_feasible(f2, cycles, Exchange{{ai, ai}}));
  CHECK_THROWS_AS(check_feasible(f2, cycles, Exchange{{99}}), InvalidArgument);
  CHECK_THROWS_AS(find_blocking(f2, cycles, make_exchange({ai, ij})), InvalidArgument);
  const StabilityReport bad = verify(f2, cycles, make_exchange({ai, ij}));
  CHECK_FALSE(bad.feasible);
  CHECK_FALSE(bad.is_stable());
}

TEST_CASE("blocking on a single two-cycle") {
  const Instance inst = two_cycle();
  const auto cycles = enumerate_cycles(inst);
  CHECK(find_blocking(inst, cycles, Exchange{}) == std::vector<int>{0});
  CHECK(find_blocking(inst, cycles, make_exchange({0})).empty());
  CHECK(find_weakly_blocking(inst, cycles, make_exchange({0})).empty());
  CHECK(transplants(cycles, make_exchange({0})) == 2);
}

TEST_CASE("ties example") {
  const Instance f2 = tied_pairs();
  const auto cycles = enumerate_cycles(f2);
  const int ai = cycle_index(cycles, {kTiesA, kTiesI});
  const int ij = cycle_index(cycles, {kTiesI, kTiesJ});
  const int jb = cycle_index(cycles, {kTiesJ, kTiesB});
  const Exchange outer = make_exchange({ai, jb});
  const Exchange middle = make_exchange({ij});
  CHECK(find_blocking(f2, cycles, outer).empty());
  CHECK(find_weakly_blocking(f2, cycles, outer).empty());
  const StabilityReport good = verify(f2, cycles, outer);
  CHECK(good.is_stable());
  CHECK(good.is_strongly_stable());
  CHECK(good.transplants == 4);

  CHECK(find_blocking(f2, cycles, middle).empty());
  const auto weakly = find_weakly_blocking(f2, cycles, middle);
  CHECK(contains(weakly, ai));
  CHECK(contains(weakly, jb));
  CHECK_FALSE(verify(f2, cycles, middle).is_strongly_stable());
}

TEST_CASE("an exchange holding every cycle leaves nothing to block") {
  const Instance inst = make_instance(4, 0, {{0, 1, 1}, {1, 0, 1}, {2, 3, 1}, {3, 2, 1}}, 2, 2,
                                      PreferenceMode::kStrict);
  const auto cycles = enumerate_cycles(inst);
  const Exchange all = make_exchange({0, 1});
  CHECK(find_weakly_blocking(inst, cycles, all).empty());
  CHECK(find_blocking(inst, cycles, all).empty());
}

TEST_CASE("verifier agrees with the definitions") {
  check_against_definitions(ranked_star());
  check_against_definitions(tied_pairs());
  check_against_definitions(complete_pairs(4, 3));
  for (std::uint64_t seed = 1; seed <= 80; ++seed) {
    const auto mode = seed % 2 ? PreferenceMode::kStrict : PreferenceMode::kWeak;
    const int k = 2 + static_cast<int>(seed % 2);
    check_against_definitions(random_instance(seed, 6 + static_cast<int>(seed % 3),
                                              static_cast<int>(seed % 2), 0.3, mode, k, k));
  }
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    check_against_definitions(generate(8, seed, PreferenceMode::kWeak, 3, 3));
  }
}

TEST_CASE("strict preferences with K=2: stable implies strongly stable") {
  int stable_seen = 0;
  for (std::uint64_t seed = 1; seed <= 120; ++seed) {
    const Instance inst = random_instance(seed, 8, static_cast<int>(seed % 2), 0.35,
                                          PreferenceMode::kStrict, 2, 2);
    const auto cycles = enumerate_cycles(inst);
    if (static_cast<int>(cycles.size()) > kOracleCycleLimit) continue;
    for_each_exchange(inst, cycles, [&](const Exchange& ex) {
      if (!find_blocking(inst, cycles, ex).empty()) return;
      ++stable_seen;
      CHECK(find_weakly_blocking(inst, cycles, ex).empty());
    });
  }
  CHECK(stable_seen > 100);
}

TEST_CASE("matched in-arcs") {
  const Instance f2 = tied_pairs();
  const auto cycles = enumerate_cycles(f2);
  const auto in = matched_in_arcs(f2, cycles, make_exchange({cycle_index(cycles, {kTiesI, kTiesJ})}));
  CHECK_FALSE(in[kTiesA].has_value());
  CHECK(in[kTiesI] == kTiesJ);
  CHECK(in[kTiesJ] == kTiesI);
}

TEST_CASE("price of stability") {
  CHECK(price_of_stability(10, 10) == doctest::Approx(0.0));
  CHECK(price_of_stability(10, 9) == doctest::Approx(10.0));
  CHECK(price_of_stability(40, 36) == doctest::Approx(10.0));
  CHECK_THROWS_AS(price_of_stability(0, 0), InvalidArgument);
  CHECK_THROWS_AS(price_of_stability(5, 6), InvalidArgument);
}

TEST_CASE("report json") {
  const Instance inst = two_cycle();
  const auto cycles = enumerate_cycles(inst);
  const std::string json = to_json(verify(inst, cycles, Exchange{}));
  CHECK(json.find("\"blocking\": [\n    0\n  ]") != std::string::npos);
  CHECK(json.find("\"feasible\": true") != std::string::npos);
}

}  // TEST_SUITE
