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

#ifndef STABLEKEP_PIPELINE_HPP_
#define STABLEKEP_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stablekep/enumerate.hpp"
#include "stablekep/formulations.hpp"
#include "stablekep/instance.hpp"
#include "stablekep/milp.hpp"
#include "stablekep/rational.hpp"
#include "stablekep/stability.hpp"

namespace stablekep {

enum class SolverKind { kInternal, kExternal };

struct PipelineOptions {
  Formulation formulation = Formulation::kCycle;
  StabilityMode mode = StabilityMode::kStable;
  ObjectiveFamily objective = ObjectiveFamily::kX;
  double time_limit_seconds = 3600.0;
  SolverKind solver = SolverKind::kInternal;
  // Shell command for the external solver; falls back to
  // $STABLEKEP_SOLVER_CMD when empty.
  std::string external_command;
  std::filesystem::path workdir = std::filesystem::temp_directory_path() / "stablekep";
};

MilpSolution run_solver(const MilpModel& model, const PipelineOptions& options);

struct SolveReport {
  SolveStatus status = SolveStatus::kInfeasible;
  std::optional<Exchange> exchange;
  int transplants = 0;
  int blocking = 0;
  int weakly_blocking = 0;
  // The verifier agrees with the mode (zero counted cycles).
  bool certified = false;
  double seconds = 0.0;
  std::int64_t nodes = 0;
  int num_cycles = 0;
  int num_variables = 0;
  int num_constraints = 0;
};

// Build, solve, decode and verify.
SolveReport solve_instance(const Instance& instance, const std::vector<Cycle>& cycles,
                           const PipelineOptions& options);

// Maximum transplants with no stability requirement, solved with the
// options' formulation. nullopt on timeout.
std::optional<int> max_transplants(const Instance& instance, const std::vector<Cycle>& cycles,
                                   const PipelineOptions& options);

struct RelaxedReport {
  Rational kappa;
  std::int64_t floor = 0;
  SolveStatus status = SolveStatus::kInfeasible;
  std::optional<Exchange> exchange;
  int transplants = 0;
  int blocking = 0;
  // Sum of tau in the solution.
  int tau_sum = 0;
  double seconds = 0.0;
};

RelaxedReport solve_relaxed(const Instance& instance, const std::vector<Cycle>& cycles,
                            const PipelineOptions& options, int m_star, const Rational& kappa);

std::string to_json(const Instance& instance, const std::vector<Cycle>& cycles,
                    const SolveReport& report);

// {"cycles": [[v, ...], ...]} resolved against the cycle list.
Exchange exchange_from_json(const Instance& instance, const std::vector<Cycle>& cycles,
                            const std::string& text);
std::string exchange_to_json(const std::vector<Cycle>& cycles, const Exchange& exchange);

// ---------------------------------------------------------------------------
// Experiments

struct SweepRow {
  std::string kappa_text;
  Rational kappa;
  std::int64_t r = 0;
  SolveStatus status = SolveStatus::kOptimal;
  int transplants = 0;
  int blocking = 0;
  double seconds = 0.0;
};

struct SweepResult {
  int m_star = 0;
  std::vector<SweepRow> rows;
};

// One relaxed solve per kappa (given as decimal text).
SweepResult run_sweep(const Instance& instance, const PipelineOptions& options,
                      const std::vector<std::string>& kappas);
void write_sweep_csv(std::ostream& out, const SweepResult& result);
// Two-series line chart (transplants and blocking cycles against kappa).
void write_sweep_svg(std::ostream& out, const SweepResult& result, const std::string& title);

struct BenchConfig {
  std::vector<int> sizes{20};
  int per_size = 50;
  int max_cycle = 2;
  int max_chain = 2;
  PreferenceMode prefs = PreferenceMode::kStrict;
  std::vector<Formulation> formulations{Formulation::kCycle};
  // "stable" and/or "strong".
  std::vector<std::string> modes{"stable"};
  std::uint64_t seed = 1;
  double time_limit_seconds = 3600.0;
  int threads = 1;
};

struct BenchRow {
  int size = 0;
  Formulation formulation = Formulation::kCycle;
  std::string mode;
  int instances = 0;
  int no_solution = 0;
  int timeouts = 0;
  double avg_ps = 0.0;
  double avg_time_s = 0.0;
};

// Seed of instance k of a size: a pure function of the config seed.
std::uint64_t bench_seed(std::uint64_t base, int size, int k);

std::vector<BenchRow> run_bench(const BenchConfig& config);
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace stablekep

#endif  // STABLEKEP_PIPELINE_HPP_
