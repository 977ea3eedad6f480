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

#ifndef STABLEKEP_MILP_HPP_
#define STABLEKEP_MILP_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "stablekep/rational.hpp"

namespace stablekep {

enum class VarKind { kBinary, kContinuous };
enum class RowSense { kLessEqual, kGreaterEqual, kEqual };
enum class ObjectiveSense { kMaximize, kMinimize };

struct Variable {
  std::string name;
  VarKind kind = VarKind::kBinary;
  Rational objective;
  // Only meaningful for continuous variables; lower bound is always 0.
  std::optional<Rational> upper;
};

struct Term {
  int var = 0;
  Rational coeff;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  RowSense sense = RowSense::kLessEqual;
  Rational rhs;
};

// Solver-agnostic mixed binary program. Variable and constraint names are
// unique and restricted to [A-Za-z_][A-Za-z0-9_]*.
class MilpModel {
 public:
  explicit MilpModel(ObjectiveSense sense = ObjectiveSense::kMaximize) : sense_(sense) {}

  int add_variable(std::string name, VarKind kind, Rational objective = 0);
  int add_constraint(std::string name, std::vector<Term> terms, RowSense sense, Rational rhs);

  ObjectiveSense sense() const { return sense_; }
  void set_sense(ObjectiveSense sense) { sense_ = sense; }
  void set_objective(int var, Rational coeff) { variables_.at(var).objective = coeff; }
  void set_upper(int var, Rational upper) { variables_.at(var).upper = upper; }

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const Variable& variable(int k) const { return variables_.at(k); }
  const Constraint& constraint(int k) const { return constraints_.at(k); }
  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  int num_binaries() const;

  std::optional<int> find_variable(const std::string& name) const;
  std::optional<int> find_constraint(const std::string& name) const;

  // Appends a term to an existing row (no merging of duplicates).
  void add_term(int row, Term term) { constraints_.at(row).terms.push_back(term); }

  // Objective value and row feasibility of a full assignment, exactly.
  Rational objective_value(const std::vector<Rational>& values) const;
  Rational row_activity(int row, const std::vector<Rational>& values) const;
  bool row_satisfied(int row, const std::vector<Rational>& values) const;
  // Description of the first violated row or bound, or nullopt.
  std::optional<std::string> first_violation(const std::vector<Rational>& values) const;

 private:
  ObjectiveSense sense_;
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::unordered_map<std::string, int> var_index_;
  std::unordered_map<std::string, int> row_index_;
};

bool is_valid_lp_name(const std::string& name);

enum class SolveStatus { kOptimal, kInfeasible, kTimedOut };

const char* to_string(SolveStatus status);

struct SolveStats {
  std::int64_t nodes = 0;
  double seconds = 0.0;
};

struct MilpSolution {
  SolveStatus status = SolveStatus::kInfeasible;
  Rational objective;
  // One value per model variable; empty when no assignment is known.
  std::vector<Rational> values;
  SolveStats stats;

  bool has_assignment() const { return status == SolveStatus::kOptimal || !values.empty(); }
};

// CPLEX LP text. Rows are scaled by the lcm of their denominators so every
// number printed is an integer; the objective must have terminating
// decimals. Byte-deterministic for a given model.
void write_lp(const MilpModel& model, std::ostream& out);
void write_lp(const MilpModel& model, const std::filesystem::path& path);
std::string to_lp_string(const MilpModel& model);

// Parser for the subset write_lp emits.
MilpModel read_lp(std::istream& in);
MilpModel read_lp(const std::filesystem::path& path);

// LP relaxation: every binary becomes continuous in [0, 1].
MilpModel relax_binaries(const MilpModel& model);

// Solution file: "status <optimal|infeasible|timeout>", "objective <d>",
// then "name value" lines.
void write_solution(const MilpModel& model, const MilpSolution& solution, std::ostream& out);
void write_solution(const MilpModel& model, const MilpSolution& solution,
                    const std::filesystem::path& path);
// Parses and validates an external solution. Values are checked within
// 1e-6, then binaries are rounded and the assignment is re-checked exactly;
// failure raises SolverDisagreement.
MilpSolution read_solution(const MilpModel& model, std::istream& in);
MilpSolution read_solution(const MilpModel& model, const std::filesystem::path& path);

// Runs `<command> <model.lp> <out.sol>` through the shell inside
// `workdir` and reads the result back.
MilpSolution solve_external(const MilpModel& model, const std::string& command,
                            const std::filesystem::path& workdir);

struct SolveOptions {
  double time_budget_seconds = 3600.0;
  // Bound nodes with the LP relaxation (dense dual simplex).
  bool use_lp = true;
};

// Exact depth-first branch and bound over the binary variables. Continuous
// variables must be defined by an equality row over binaries; they are
// substituted out. Anything else raises UnsupportedStructure.
MilpSolution solve_exact(const MilpModel& model, const SolveOptions& options = {});

}  // namespace stablekep

#endif  // STABLEKEP_MILP_HPP_
