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

#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "stablekep/enumerate.hpp"
#include "stablekep/errors.hpp"
#include "stablekep/oracle.hpp"
#include "stablekep/pipeline.hpp"
#include "support.hpp"

using namespace stablekep;
using namespace stablekep::testing;

namespace {

int count_of(const std::string& text, const std::string& needle) {
  int n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("solve the two-cycle") {
  const Instance inst = two_cycle();
  const auto cycles = enumerate_cycles(inst);
  for (Formulation f : {Formulation::kEdge, Formulation::kCycle, Formulation::kCycleEdge}) {
    PipelineOptions opt;
    opt.formulation = f;
    const SolveReport r = solve_instance(inst, cycles, opt);
    CHECK(r.status == SolveStatus::kOptimal);
    CHECK(r.certified);
    CHECK(r.transplants == 2);
    CHECK(r.blocking == 0);
    REQUIRE(r.exchange);
    CHECK(r.exchange->cycle_indices == std::vector<int>{0});
    CHECK(max_transplants(inst, cycles, opt) == 2);
  }
}

TEST_CASE("strong mode with no solution") {
  std::optional<Instance> bad;
  for (std::uint64_t seed = 1; seed <= 2000 && !bad; ++seed) {
    Instance inst = generate(10, seed, PreferenceMode::kWeak, 2, 2);
    const auto cycles = enumerate_cycles(inst);
    if (static_cast<int>(cycles.size()) > kOracleCycleLimit) continue;
    if (!oracle_optimum(inst, cycles, StabilityMode::kStronglyStableWeak).witness) bad = inst;
  }
  REQUIRE(bad);
  const auto cycles = enumerate_cycles(*bad);
  PipelineOptions opt;
  opt.mode = StabilityMode::kStronglyStableWeak;
  const SolveReport r = solve_instance(*bad, cycles, opt);
  CHECK(r.status == SolveStatus::kInfeasible);
  CHECK_FALSE(r.exchange);
}

TEST_CASE("report json") {
  const Instance inst = tied_pairs();
  const auto cycles = enumerate_cycles(inst);
  PipelineOptions opt;
  opt.mode = StabilityMode::kStronglyStableWeak;
  const SolveReport r = solve_instance(inst, cycles, opt);
  REQUIRE(r.exchange);
  const std::string json = to_json(inst, cycles, r);
  CHECK(json.find("\"status\"") != std::string::npos);
  CHECK(json.find("\"exchange\"") != std::string::npos);
  const Exchange back = exchange_from_json(inst, cycles, exchange_to_json(cycles, *r.exchange));
  CHECK(back == *r.exchange);
}

TEST_CASE("exchange json errors") {
  const Instance inst = tied_pairs();
  const auto cycles = enumerate_cycles(inst);
  CHECK_THROWS_AS(exchange_from_json(inst, cycles, "{"), ParseError);
  CHECK_THROWS_AS(exchange_from_json(inst, cycles, "{}"), ParseError);
  CHECK_THROWS_AS(exchange_from_json(inst, cycles, R"({"cycles": [1]})"), ParseError);
  CHECK_THROWS_AS(exchange_from_json(inst, cycles, R"({"cycles": [["a"]]})"), ParseError);
  CHECK_THROWS_AS(exchange_from_json(inst, cycles, R"({"cycles": [[0, 3]]})"), Error);
  // Rotations resolve to the same cycle.
  const Exchange e = exchange_from_json(inst, cycles, R"({"cycles": [[1, 0], [2, 3]]})");
  CHECK(e.cycle_indices.size() == 2);
  // Duplicates survive for the feasibility check.
  const Exchange dup = exchange_from_json(inst, cycles, R"({"cycles": [[0, 1], [1, 0]]})");
  CHECK(dup.cycle_indices.size() == 2);
  CHECK_FALSE(check_feasible(inst, cycles, dup));
}

TEST_CASE("sweep on the two-cycle") {
  PipelineOptions opt;
  const SweepResult s = run_sweep(two_cycle(), opt, {"0", "0.5", "1"});
  CHECK(s.m_star == 2);
  REQUIRE(s.rows.size() == 3);
  for (const SweepRow& row : s.rows) {
    CHECK(row.status == SolveStatus::kOptimal);
    CHECK(row.transplants == 2);
    CHECK(row.blocking == 0);
  }
  CHECK(s.rows[0].r == 2);
  CHECK(s.rows[1].r == 1);
  CHECK(s.rows[2].r == 0);
  std::ostringstream csv;
  write_sweep_csv(csv, s);
  const std::string text = csv.str();
  CHECK(text.rfind("kappa,R,transplants,blocking,time_s\n", 0) == 0);
  CHECK(count_of(text, "\n") == 4);
  CHECK(text.find("\n0.5,1,2,0,") != std::string::npos);
  std::ostringstream svg;
  write_sweep_svg(svg, s, "two");
  CHECK(count_of(svg.str(), "<polyline") == 2);
  CHECK(svg.str().rfind("<svg", 0) == 0);
}

TEST_CASE("sweep rejects kappa outside the unit interval") {
  PipelineOptions opt;
  CHECK_THROWS_AS(run_sweep(two_cycle(), opt, {"1.5"}), InvalidArgument);
  CHECK_THROWS_AS(run_sweep(two_cycle(), opt, {"-0.1"}), InvalidArgument);
  CHECK_THROWS(run_sweep(two_cycle(), opt, {"x"}));
}

TEST_CASE("bench") {
  CHECK(bench_seed(1, 20, 0) == bench_seed(1, 20, 0));
  CHECK(bench_seed(1, 20, 0) != bench_seed(1, 20, 1));
  CHECK(bench_seed(1, 20, 0) != bench_seed(1, 30, 0));
  CHECK(bench_seed(1, 20, 0) != bench_seed(2, 20, 0));

  BenchConfig cfg;
  cfg.sizes = {10};
  cfg.per_size = 3;
  cfg.formulations = {Formulation::kCycle, Formulation::kCycleEdge};
  cfg.modes = {"stable", "strong"};
  const auto rows = run_bench(cfg);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].avg_ps == doctest::Approx(rows[2].avg_ps));
  CHECK(rows[1].avg_ps == doctest::Approx(rows[3].avg_ps));
  CHECK(rows[0].no_solution == rows[2].no_solution);
  for (const BenchRow& r : rows) {
    CHECK(r.instances == 3);
    CHECK(r.avg_ps >= 0.0);
    CHECK(r.avg_ps <= 100.0);
  }
  const auto again = run_bench(cfg);
  for (std::size_t k = 0; k < rows.size(); ++k) CHECK(rows[k].avg_ps == again[k].avg_ps);
  std::ostringstream csv;
  write_bench_csv(csv, rows);
  CHECK(csv.str().rfind("size,formulation,mode,instances,no_solution,avg_ps,avg_time_s\n", 0) == 0);
  CHECK(count_of(csv.str(), "\n") == 5);
  cfg.per_size = 0;
  CHECK_THROWS_AS(run_bench(cfg), InvalidArgument);
}

}  // TEST_SUITE
