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

#include <optional>
#include <random>
#include <vector>

#include "doctest.h"
#include "stablekep/errors.hpp"
#include "stablekep/milp.hpp"

using namespace stablekep;

namespace {

// Best objective over all 0/1 assignments, or nullopt when none is feasible.
std::optional<Rational> brute_force(const MilpModel& m) {
  const int n = m.num_variables();
  std::optional<Rational> best;
  std::vector<Rational> x(n);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    for (int v = 0; v < n; ++v) x[v] = (mask >> v) & 1u;
    if (m.first_violation(x)) continue;
    const Rational obj = m.objective_value(x);
    const bool better = !best || (m.sense() == ObjectiveSense::kMaximize ? obj > *best : obj < *best);
    if (better) best = obj;
  }
  return best;
}

MilpModel random_binary_model(std::mt19937_64& rng, int n, int rows, bool packing) {
  std::uniform_int_distribution<int> coef(-3, 3);
  std::uniform_int_distribution<int> pos(0, 3);
  std::uniform_int_distribution<int> den(1, 3);
  std::uniform_int_distribution<int> pick(0, n - 1);
  MilpModel m(rng() % 3 ? ObjectiveSense::kMaximize : ObjectiveSense::kMinimize);
  for (int v = 0; v < n; ++v) m.add_variable("x" + std::to_string(v), VarKind::kBinary, Rational(coef(rng), den(rng)));
  for (int r = 0; r < rows; ++r) {
    std::vector<Term> terms;
    const int len = 2 + static_cast<int>(rng() % 4);
    for (int t = 0; t < len; ++t) {
      terms.push_back({pick(rng), packing ? Rational(1 + pos(rng)) : Rational(coef(rng), den(rng))});
    }
    const auto sense = packing ? (rng() % 4 ? RowSense::kLessEqual : RowSense::kGreaterEqual)
                               : static_cast<RowSense>(rng() % 3);
    m.add_constraint("r" + std::to_string(r), terms, sense,
                     packing ? Rational(1 + pos(rng)) : Rational(coef(rng), den(rng)));
  }
  return m;
}

void check_against_brute_force(const MilpModel& m) {
  const auto expected = brute_force(m);
  for (bool lp : {true, false}) {
    const MilpSolution s = solve_exact(m, SolveOptions{60.0, lp});
    if (!expected) {
      CHECK(s.status == SolveStatus::kInfeasible);
      continue;
    }
    REQUIRE(s.status == SolveStatus::kOptimal);
    CHECK(s.objective == *expected);
    CHECK_FALSE(m.first_violation(s.values).has_value());
    CHECK(m.objective_value(s.values) == s.objective);
  }
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("two binaries sharing a row") {
  MilpModel m;
  const int a = m.add_variable("x1", VarKind::kBinary, 1);
  const int b = m.add_variable("x2", VarKind::kBinary, 1);
  m.add_constraint("c", {{a, 1}, {b, 1}}, RowSense::kLessEqual, 1);
  const MilpSolution s = solve_exact(m);
  CHECK(s.status == SolveStatus::kOptimal);
  CHECK(s.objective == 1);
}

TEST_CASE("contradictory bounds are infeasible") {
  MilpModel m;
  const int x = m.add_variable("x", VarKind::kBinary, 1);
  m.add_constraint("lo", {{x, 1}}, RowSense::kGreaterEqual, 1);
  m.add_constraint("hi", {{x, 1}}, RowSense::kLessEqual, 0);
  CHECK(solve_exact(m).status == SolveStatus::kInfeasible);
  CHECK(solve_exact(m, SolveOptions{10.0, false}).status == SolveStatus::kInfeasible);
}

TEST_CASE("empty model has objective 0") {
  const MilpSolution s = solve_exact(MilpModel{});
  CHECK(s.status == SolveStatus::kOptimal);
  CHECK(s.objective == 0);
  CHECK(s.values.empty());
  CHECK(s.has_assignment());
}

TEST_CASE("continuous variables are substituted through equalities") {
  MilpModel m;
  const int a = m.add_variable("a", VarKind::kBinary);
  const int b = m.add_variable("b", VarKind::kBinary);
  const int y = m.add_variable("y", VarKind::kContinuous, 3);
  m.add_constraint("link", {{a, 1}, {b, 1}, {y, -2}}, RowSense::kEqual, 0);
  m.add_constraint("cap", {{a, 1}, {b, 1}}, RowSense::kLessEqual, 1);
  const MilpSolution s = solve_exact(m);
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(s.objective == Rational(3, 2));
  CHECK(s.values[y] == Rational(1, 2));
}

TEST_CASE("continuous upper bounds are enforced") {
  MilpModel m;
  const int a = m.add_variable("a", VarKind::kBinary, 1);
  const int b = m.add_variable("b", VarKind::kBinary, 1);
  const int y = m.add_variable("y", VarKind::kContinuous);
  m.set_upper(y, 1);
  m.add_constraint("link", {{a, 1}, {b, 1}, {y, -1}}, RowSense::kEqual, 0);
  CHECK(solve_exact(m).objective == 1);
}

TEST_CASE("free continuous variable is unsupported") {
  MilpModel m;
  const int a = m.add_variable("a", VarKind::kBinary, 1);
  const int y = m.add_variable("y", VarKind::kContinuous, 1);
  m.add_constraint("c", {{a, 1}, {y, 1}}, RowSense::kLessEqual, 2);
  CHECK_THROWS_AS(solve_exact(m), UnsupportedStructure);
}

TEST_CASE("optimum matches exhaustive enumeration") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 300; ++t) {
    const int n = 2 + t % 13;
    check_against_brute_force(random_binary_model(rng, n, 1 + t % 9, t % 2 == 0));
  }
}

TEST_CASE("optimum matches exhaustive enumeration at 20 binaries") {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 4; ++t) check_against_brute_force(random_binary_model(rng, 20, 14, true));
}

TEST_CASE("time budget yields a timeout status with the incumbent") {
  std::mt19937_64 rng(5);
  MilpModel m;
  std::uniform_int_distribution<int> w(1, 1000);
  std::vector<Term> row;
  for (int v = 0; v < 60; ++v) {
    const int x = m.add_variable("x" + std::to_string(v), VarKind::kBinary, w(rng));
    row.push_back({x, w(rng)});
  }
  m.add_constraint("knap", row, RowSense::kLessEqual, 12345);
  const MilpSolution s = solve_exact(m, SolveOptions{0.0, false});
  CHECK(s.status == SolveStatus::kTimedOut);
  if (!s.values.empty()) CHECK_FALSE(m.first_violation(s.values).has_value());
}

}  // TEST_SUITE
