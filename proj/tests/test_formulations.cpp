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
#include <string>
#include <vector>

#include "doctest.h"
#include "stablekep/enumerate.hpp"
#include "stablekep/errors.hpp"
#include "stablekep/formulations.hpp"
#include "stablekep/oracle.hpp"
#include "stablekep/pipeline.hpp"
#include "stablekep/prefs.hpp"
#include "stablekep/stability.hpp"
#include "support.hpp"

using namespace stablekep;
using namespace stablekep::testing;

namespace {

constexpr Formulation kAllFormulations[] = {Formulation::kEdge, Formulation::kCycle,
                                            Formulation::kCycleEdge};

std::vector<StabilityMode> modes_for(const Instance& inst) {
  return {StabilityMode::kUnconstrained, StabilityMode::kStable, strong_mode_for(inst.mode())};
}

int count_prefix(const MilpModel& m, const std::string& prefix) {
  int n = 0;
  for (const auto& c : m.constraints()) n += c.name.rfind(prefix, 0) == 0;
  return n;
}

bool contains(const std::vector<int>& list, int x) {
  return std::find(list.begin(), list.end(), x) != list.end();
}

// Every exchange maps to a feasible point; stability rows hold exactly
// when the verifier finds the cycle unblocked; decode inverts encode.
void audit_rows(const Instance& inst) {
  const auto cycles = enumerate_cycles(inst);
  if (static_cast<int>(cycles.size()) > kOracleCycleLimit) return;
  const auto exchanges = all_exchanges(inst, cycles);
  for (Formulation f : kAllFormulations) {
    for (StabilityMode mode : modes_for(inst)) {
      const BuildArtifacts art = build(inst, cycles, f, mode);
      for (const Exchange& ex : exchanges) {
        const auto x = encode(inst, cycles, art, ex);
        const auto blocking = mode == StabilityMode::kStable
                                  ? find_blocking(inst, cycles, ex)
                                  : find_weakly_blocking(inst, cycles, ex);
        for (int r = 0; r < art.model.num_constraints(); ++r) {
          const std::string& name = art.model.constraint(r).name;
          if (name.rfind("stab_", 0) == 0) continue;
          CHECK_MESSAGE(art.model.row_satisfied(r, x), to_string(f), " row ", name);
        }
        for (int c = 0; c < static_cast<int>(cycles.size()); ++c) {
          if (mode == StabilityMode::kUnconstrained) {
            CHECK(art.stability_row[c] < 0);
            continue;
          }
          REQUIRE(art.stability_row[c] >= 0);
          const bool holds = art.model.row_satisfied(art.stability_row[c], x);
          CHECK_MESSAGE(holds == !contains(blocking, c), to_string(f), " ", to_string(mode),
                        " cycle ", format_cycle(cycles[c]));
        }
        MilpSolution sol;
        sol.status = SolveStatus::kOptimal;
        sol.values = x;
        if (!art.model.first_violation(x)) {
          CHECK(decode(inst, cycles, art, sol) == ex);
          CHECK(art.model.objective_value(x) == transplants(cycles, ex));
        }
      }
    }
  }
}

}  // namespace

TEST_SUITE("formulations") {

TEST_CASE("mode and formulation names") {
  CHECK(parse_stability_mode("strong", PreferenceMode::kWeak) == StabilityMode::kStronglyStableWeak);
  CHECK(parse_stability_mode("strong", PreferenceMode::kStrict) == StabilityMode::kStronglyStableStrict);
  CHECK(parse_stability_mode("stable", PreferenceMode::kWeak) == StabilityMode::kStable);
  CHECK_THROWS_AS(parse_stability_mode("stabel", PreferenceMode::kWeak), InvalidArgument);
  CHECK(parse_formulation("cef") == Formulation::kCycleEdge);
  CHECK_THROWS_AS(parse_formulation("xf"), InvalidArgument);
  CHECK(is_strong(StabilityMode::kStronglyStableWeak));
  CHECK_FALSE(is_strong(StabilityMode::kStable));
}

TEST_CASE("strong modes must match the preference kind") {
  const auto cycles = enumerate_cycles(two_cycle());
  for (Formulation f : kAllFormulations) {
    CHECK_THROWS_AS(build(two_cycle(), cycles, f, StabilityMode::kStronglyStableWeak),
                    InvalidArgument);
    CHECK_THROWS_AS(build(tied_pairs(), enumerate_cycles(tied_pairs()), f, StabilityMode::kStronglyStableStrict),
                    InvalidArgument);
  }
}

TEST_CASE("edge model of a two-cycle") {
  const Instance inst = two_cycle();
  const auto cycles = enumerate_cycles(inst);
  const BuildArtifacts art = build(inst, cycles, Formulation::kEdge, StabilityMode::kStable);
  const MilpModel& m = art.model;
  CHECK(m.num_variables() == 6);
  CHECK(m.find_variable("y_0_1"));
  CHECK(m.find_variable("yc_1_0"));
  CHECK(m.find_variable("yn_0_1"));
  CHECK(count_prefix(m, "out_") == 2);
  CHECK(count_prefix(m, "split_") == 2);
  CHECK(count_prefix(m, "flow") == 4);
  CHECK(count_prefix(m, "path_") == 0);
  CHECK(count_prefix(m, "stab_") == 1);
  // Single-arc chain runs are cut because L=2 serves one pair.
  CHECK(count_prefix(m, "guard_") == 2);
  const Constraint& stab = m.constraint(art.stability_row[0]);
  CHECK(stab.terms.size() == 2);
  CHECK(stab.rhs == 1);
  CHECK(solve_exact(m).objective == 2);
}

TEST_CASE("empty instances give empty models") {
  const Instance empty = make_instance(2, 0, {}, 2, 2, PreferenceMode::kStrict);
  const auto cycles = enumerate_cycles(empty);
  const BuildArtifacts ef = build(empty, cycles, Formulation::kEdge, StabilityMode::kStable);
  CHECK(ef.model.num_variables() == 0);
  CHECK(ef.model.num_constraints() == 0);
  const BuildArtifacts cf = build(empty, cycles, Formulation::kCycle, StabilityMode::kStable);
  CHECK(cf.model.num_variables() == 0);
  const MilpSolution s = solve_exact(cf.model);
  CHECK(s.status == SolveStatus::kOptimal);
  CHECK(s.objective == 0);
  CHECK(decode(empty, cycles, cf, s).cycle_indices.empty());
}

TEST_CASE("cycle model of a two-cycle") {
  const Instance inst = two_cycle();
  const auto cycles = enumerate_cycles(inst);
  const BuildArtifacts art = build(inst, cycles, Formulation::kCycle, StabilityMode::kStable);
  CHECK(art.model.num_variables() == 1);
  CHECK(art.model.variable(0).objective == 2);
  CHECK(count_prefix(art.model, "pack_") == 2);
  CHECK(art.model.constraint(art.stability_row[0]).sense == RowSense::kGreaterEqual);
  const MilpSolution s = solve_exact(art.model);
  CHECK(s.objective == 2);
  const Exchange ex = decode(inst, cycles, art, s);
  CHECK(ex.cycle_indices == std::vector<int>{0});
  CHECK(transplants(cycles, ex) == 2);

  MilpSolution zero;
  zero.status = SolveStatus::kOptimal;
  zero.values = {0};
  CHECK(decode(inst, cycles, build(inst, cycles, Formulation::kCycle, StabilityMode::kUnconstrained), zero)
            .cycle_indices.empty());
}

TEST_CASE("cycle-edge model of a two-cycle, both objectives") {
  const Instance inst = two_cycle();
  const auto cycles = enumerate_cycles(inst);
  for (auto obj : {ObjectiveFamily::kX, ObjectiveFamily::kY}) {
    const BuildArtifacts art = build(inst, cycles, Formulation::kCycleEdge, StabilityMode::kStable, obj);
    const MilpSolution s = solve_exact(art.model);
    CHECK(s.objective == 2);
    CHECK(s.values[art.cycle_var[0]] == 1);
    CHECK(s.values[*art.model.find_variable("y_0_1")] == 1);
    CHECK(s.values[*art.model.find_variable("y_1_0")] == 1);
  }
}

TEST_CASE("ties example under strong stability") {
  const Instance f2 = tied_pairs();
  const auto cycles = enumerate_cycles(f2);
  const int ai = cycle_index(cycles, {kTiesA, kTiesI});
  const int ij = cycle_index(cycles, {kTiesI, kTiesJ});
  const int jb = cycle_index(cycles, {kTiesJ, kTiesB});
  const Exchange outer = make_exchange({ai, jb});
  for (Formulation f : kAllFormulations) {
    const BuildArtifacts art = build(f2, cycles, f, StabilityMode::kStronglyStableWeak);
    CHECK(art.model.row_satisfied(art.stability_row[ij], encode(f2, cycles, art, outer)));
    CHECK_FALSE(art.model.row_satisfied(art.stability_row[ai],
                                        encode(f2, cycles, art, make_exchange({ij}))));
    const MilpSolution s = solve_exact(art.model);
    REQUIRE(s.status == SolveStatus::kOptimal);
    CHECK(s.objective == 4);
    CHECK(decode(f2, cycles, art, s) == outer);
  }
}

TEST_CASE("cycle-edge links fix y from x") {
  const Instance inst = generate(10, 3, PreferenceMode::kStrict, 3, 3);
  const auto cycles = enumerate_cycles(inst);
  const BuildArtifacts art = build(inst, cycles, Formulation::kCycleEdge, StabilityMode::kStable);
  CHECK(count_prefix(art.model, "link_") > 0);
  for (const auto& row : art.model.constraints()) {
    if (row.name.rfind("link_", 0) != 0) continue;
    CHECK(row.sense == RowSense::kEqual);
    int continuous = 0;
    for (const Term& t : row.terms) continuous += art.model.variable(t.var).kind == VarKind::kContinuous;
    CHECK(continuous == 1);
  }
}

TEST_CASE("stability rows match the verifier on every exchange") {
  audit_rows(two_cycle());
  audit_rows(ranked_star());
  audit_rows(tied_pairs());
  audit_rows(complete_pairs(3, 3));
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto mode = seed % 2 ? PreferenceMode::kStrict : PreferenceMode::kWeak;
    const int k = 2 + static_cast<int>(seed % 2);
    const int l = 2 + static_cast<int>((seed / 2) % 2);
    audit_rows(random_instance(seed, 5, static_cast<int>(seed % 3 == 0), 0.3, mode, k, l));
  }
}

TEST_CASE("formulations agree with each other and with the verifier") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const auto prefs = seed % 2 ? PreferenceMode::kStrict : PreferenceMode::kWeak;
    const Instance inst = generate(10, seed, prefs, 3, 3);
    const auto cycles = enumerate_cycles(inst);
    for (StabilityMode mode : modes_for(inst)) {
      std::vector<SolveStatus> status;
      std::vector<Rational> value;
      for (Formulation f : kAllFormulations) {
        const BuildArtifacts art = build(inst, cycles, f, mode);
        const MilpSolution s = solve_exact(art.model);
        status.push_back(s.status);
        value.push_back(s.objective);
        if (s.status != SolveStatus::kOptimal) continue;
        const Exchange ex = decode(inst, cycles, art, s);
        CHECK(transplants(cycles, ex) == s.objective);
        CHECK(satisfies_mode(inst, cycles, ex, mode));
      }
      CHECK(status[0] == status[1]);
      CHECK(status[1] == status[2]);
      if (status[0] == SolveStatus::kOptimal) {
        CHECK(value[0] == value[1]);
        CHECK(value[1] == value[2]);
      }
    }
  }
}

TEST_CASE("transplant floor rounds up") {
  CHECK(transplant_floor(10, Rational(1, 20)) == 10);
  CHECK(transplant_floor(10, Rational(1, 10)) == 9);
  CHECK(transplant_floor(10, Rational(3, 20)) == 9);
  CHECK(transplant_floor(7, 1) == 0);
  CHECK(transplant_floor(7, 0) == 7);
  CHECK_THROWS_AS(transplant_floor(7, Rational(-1, 10)), InvalidArgument);
  CHECK_THROWS_AS(transplant_floor(7, Rational(11, 10)), InvalidArgument);
}

TEST_CASE("relaxed model structure") {
  const Instance inst = two_cycle();
  const auto cycles = enumerate_cycles(inst);
  const BuildArtifacts base = build(inst, cycles, Formulation::kCycle, StabilityMode::kStable);
  const BuildArtifacts r = build_relaxed(inst, base, 2, 0);
  CHECK(r.relaxed);
  CHECK(r.model.sense() == ObjectiveSense::kMinimize);
  REQUIRE(r.budget_row.has_value());
  CHECK(r.model.constraint(*r.budget_row).name == "budget");
  CHECK(r.model.constraint(*r.budget_row).rhs == 2);
  REQUIRE(r.tau_var[0] >= 0);
  CHECK(r.model.variable(r.tau_var[0]).name == "tau_c0");
  CHECK(r.model.variable(r.tau_var[0]).objective == 2);
  const MilpSolution s = solve_exact(r.model);
  CHECK(s.values[r.tau_var[0]] == 0);
  CHECK(decode(inst, cycles, r, s).cycle_indices == std::vector<int>{0});
  CHECK_THROWS_AS(build_relaxed(inst, r, 2, 0), InvalidArgument);
  CHECK_THROWS_AS(build_relaxed(inst, build(inst, cycles, Formulation::kCycle,
                                            StabilityMode::kUnconstrained), 2, 0),
                  InvalidArgument);
}

TEST_CASE("relaxed objective orders by blocking count first") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto prefs = seed % 2 ? PreferenceMode::kStrict : PreferenceMode::kWeak;
    const Instance inst = random_instance(seed, 6, static_cast<int>(seed % 2), 0.35, prefs, 3, 3);
    const auto cycles = enumerate_cycles(inst);
    if (static_cast<int>(cycles.size()) > kOracleCycleLimit) continue;
    for (Formulation f : kAllFormulations) {
      for (StabilityMode mode : {StabilityMode::kStable, strong_mode_for(prefs)}) {
        const BuildArtifacts r = build_relaxed(inst, build(inst, cycles, f, mode), 0, 1);
        struct Point {
          int blocking;
          int transplants;
          Rational objective;
        };
        std::vector<Point> points;
        for (const Exchange& ex : all_exchanges(inst, cycles)) {
          auto x = encode(inst, cycles, r, ex);
          const int b = blocking_count(inst, cycles, ex, mode);
          const auto blocked = mode == StabilityMode::kStable ? find_blocking(inst, cycles, ex)
                                                              : find_weakly_blocking(inst, cycles, ex);
          for (int c : blocked) x[r.tau_var[c]] = 1;
          CHECK_FALSE(r.model.first_violation(x).has_value());
          for (int c : blocked) {
            x[r.tau_var[c]] = 0;
            CHECK(r.model.first_violation(x).has_value());
            x[r.tau_var[c]] = 1;
          }
          points.push_back({b, transplants(cycles, ex), r.model.objective_value(x)});
        }
        for (const Point& a : points) {
          for (const Point& b : points) {
            if (a.blocking >= b.blocking) continue;
            CHECK(a.objective <= b.objective);
            const bool tie_case = inst.num_ndds() == 0 && a.blocking + 1 == b.blocking &&
                                  a.transplants == 0 && b.transplants == inst.num_vertices();
            if (!tie_case) CHECK(a.objective < b.objective);
          }
        }
      }
    }
  }
}

TEST_CASE("relaxed model endpoints match the oracle") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const auto prefs = seed % 2 ? PreferenceMode::kStrict : PreferenceMode::kWeak;
    const Instance inst = random_instance(seed, 7, static_cast<int>(seed % 2), 0.3, prefs, 3, 3);
    const auto cycles = enumerate_cycles(inst);
    if (static_cast<int>(cycles.size()) > kOracleCycleLimit) continue;
    const int m_star = oracle_optimum(inst, cycles, StabilityMode::kUnconstrained).objective;
    for (StabilityMode mode : {StabilityMode::kStable, strong_mode_for(prefs)}) {
      const auto best = oracle_optimum(inst, cycles, mode);
      for (Formulation f : kAllFormulations) {
        const BuildArtifacts base = build(inst, cycles, f, mode);
        const BuildArtifacts r0 = build_relaxed(inst, base, m_star, 0);
        const MilpSolution s0 = solve_exact(r0.model);
        REQUIRE(s0.status == SolveStatus::kOptimal);
        const Exchange e0 = decode(inst, cycles, r0, s0);
        const auto o0 = oracle_min_blocking(inst, cycles, mode, 0, m_star);
        CHECK(transplants(cycles, e0) == m_star);
        CHECK(blocking_count(inst, cycles, e0, mode) == o0.blocking);

        const BuildArtifacts r1 = build_relaxed(inst, base, m_star, 1);
        const MilpSolution s1 = solve_exact(r1.model);
        const Exchange e1 = decode(inst, cycles, r1, s1);
        if (best.witness) {
          CHECK(blocking_count(inst, cycles, e1, mode) == 0);
          CHECK(transplants(cycles, e1) == best.objective);
        }
      }
    }
  }
}

TEST_CASE("edge model of a 30-pair pool agrees with the cycle model") {
  // Weak root relaxation and a large row set.
  const Instance inst = generate(30, bench_seed(202, 30, 28), PreferenceMode::kStrict, 2, 2);
  const auto cycles = enumerate_cycles(inst);
  for (StabilityMode mode : modes_for(inst)) {
    const MilpSolution cf = solve_exact(build(inst, cycles, Formulation::kCycle, mode).model);
    SolveOptions opt;
    opt.time_budget_seconds = 60;
    const MilpSolution ef = solve_exact(build(inst, cycles, Formulation::kEdge, mode).model, opt);
    CHECK(ef.status == cf.status);
    CHECK(ef.objective == cf.objective);
  }
}

}  // TEST_SUITE
