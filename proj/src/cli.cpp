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

#include "stablekep/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "stablekep/enumerate.hpp"
#include "stablekep/errors.hpp"
#include "stablekep/formulations.hpp"
#include "stablekep/instance.hpp"
#include "stablekep/pipeline.hpp"
#include "stablekep/stability.hpp"

namespace stablekep {
namespace {

constexpr int kExitUsage = 64;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << text;
  if (!out) throw InvalidArgument("write failed: " + path);
}

ObjectiveFamily parse_objective(const std::string& text) {
  if (text == "x") return ObjectiveFamily::kX;
  if (text == "y") return ObjectiveFamily::kY;
  throw InvalidArgument("objective must be x or y, got " + text);
}

int exit_code_for(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return kExitOk;
    case SolveStatus::kInfeasible:
      return kExitNoSolution;
    case SolveStatus::kTimedOut:
      return kExitTimeout;
  }
  return kExitError;
}

nlohmann::json cycle_list(const std::vector<Cycle>& cycles, const std::vector<int>& indices) {
  nlohmann::json list = nlohmann::json::array();
  for (int c : indices) list.push_back(cycles.at(c).vertices);
  return list;
}

struct SolveArgs {
  std::string instance;
  std::string formulation = "cf";
  std::string mode = "stable";
  std::string objective = "x";
  double time_limit = 3600.0;
  std::string solver = "internal";
  std::string solver_cmd;
  std::string workdir;
  std::string out;
};

PipelineOptions pipeline_options(const SolveArgs& a, const Instance& instance) {
  PipelineOptions o;
  o.formulation = parse_formulation(a.formulation);
  o.mode = parse_stability_mode(a.mode, instance.mode());
  o.objective = parse_objective(a.objective);
  o.time_limit_seconds = a.time_limit;
  o.solver = a.solver == "external" ? SolverKind::kExternal : SolverKind::kInternal;
  o.external_command = a.solver_cmd;
  if (!a.workdir.empty()) o.workdir = a.workdir;
  return o;
}

void add_solver_flags(CLI::App* cmd, SolveArgs& a) {
  cmd->add_option("--formulation", a.formulation, "ef, cf or cef")
      ->check(CLI::IsMember({"ef", "cf", "cef"}));
  cmd->add_option("--mode", a.mode,
                  "stable, strong, strong-strict, strong-weak or unconstrained");
  cmd->add_option("--objective", a.objective, "x or y")->check(CLI::IsMember({"x", "y"}));
  cmd->add_option("--time-limit", a.time_limit, "seconds per solve")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--solver", a.solver, "internal or external")
      ->check(CLI::IsMember({"internal", "external"}));
  cmd->add_option("--solver-cmd", a.solver_cmd,
                  "external solver command, run as: cmd model.lp out.sol");
  cmd->add_option("--workdir", a.workdir, "scratch directory for external solves");
}

int cmd_generate(int pairs, std::uint64_t seed, const std::string& mode, int k, int l,
                 const std::string& out_path, std::ostream& out) {
  const Instance inst = generate(pairs, seed, parse_preference_mode(mode), k, l);
  save(inst, out_path);
  const std::vector<Cycle> cycles = enumerate_cycles(inst);
  const auto chains = std::count_if(cycles.begin(), cycles.end(), [](const Cycle& c) {
    return c.kind == CycleKind::kNddCycle;
  });
  out << "|P|=" << inst.num_pairs() << " |N|=" << inst.num_ndds() << " |A|=" << inst.num_real_arcs()
      << " |C^P|=" << static_cast<long>(cycles.size()) - chains << " |C^N|=" << chains << "\n";
  return kExitOk;
}

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  const Instance inst = load(a.instance);
  const std::vector<Cycle> cycles = enumerate_cycles(inst);
  const PipelineOptions o = pipeline_options(a, inst);
  const SolveReport report = solve_instance(inst, cycles, o);
  const std::string json = to_json(inst, cycles, report);
  if (a.out.empty()) {
    out << json;
  } else {
    write_text(a.out, json);
  }
  out << "status " << to_string(report.status) << " transplants " << report.transplants
      << " blocking " << report.blocking << " weakly_blocking " << report.weakly_blocking
      << " time_s " << report.seconds << "\n";
  if (report.status == SolveStatus::kOptimal && !report.certified) {
    err << "error: solution failed stability verification\n";
    return kExitError;
  }
  return exit_code_for(report.status);
}

int cmd_verify(const std::string& instance_path, const std::string& exchange_path,
               const std::string& out_path, std::ostream& out, std::ostream& err) {
  const Instance inst = load(instance_path);
  const std::vector<Cycle> cycles = enumerate_cycles(inst);
  const Exchange ex = exchange_from_json(inst, cycles, read_text(exchange_path));
  const StabilityReport r = verify(inst, cycles, ex);
  nlohmann::json doc = nlohmann::json::parse(to_json(r));
  doc["stable"] = r.is_stable();
  doc["strongly_stable"] = r.is_strongly_stable();
  doc["blocking_cycles"] = cycle_list(cycles, r.blocking);
  doc["weakly_blocking_cycles"] = cycle_list(cycles, r.weakly_blocking);
  const std::string json = doc.dump(2) + "\n";
  if (out_path.empty()) {
    out << json;
  } else {
    write_text(out_path, json);
  }
  if (!r.feasible) {
    err << "error: exchange is not feasible (shared vertex or repeated cycle)\n";
    return kExitInfeasibleExchange;
  }
  out << "feasible transplants " << r.transplants << " blocking " << r.blocking.size()
      << " weakly_blocking " << r.weakly_blocking.size() << "\n";
  return kExitOk;
}

int cmd_sweep(const SolveArgs& a, const std::vector<std::string>& kappas,
              const std::string& svg_path, std::ostream& out) {
  const Instance inst = load(a.instance);
  const PipelineOptions o = pipeline_options(a, inst);
  const SweepResult result = run_sweep(inst, o, kappas);
  std::ostringstream csv;
  write_sweep_csv(csv, result);
  if (a.out.empty()) {
    out << csv.str();
  } else {
    write_text(a.out, csv.str());
  }
  if (!svg_path.empty()) {
    std::ostringstream svg;
    write_sweep_svg(svg, result, std::string(to_string(o.mode)) + " " + to_string(o.formulation));
    write_text(svg_path, svg.str());
  }
  out << "M* " << result.m_star << "\n";
  const bool timed_out = std::any_of(result.rows.begin(), result.rows.end(), [](const SweepRow& r) {
    return r.status == SolveStatus::kTimedOut;
  });
  return timed_out ? kExitTimeout : kExitOk;
}

int cmd_bench(BenchConfig config, const std::string& prefs,
              const std::vector<std::string>& formulations, const std::string& out_path,
              std::ostream& out) {
  config.prefs = parse_preference_mode(prefs);
  config.formulations.clear();
  for (const auto& f : formulations) config.formulations.push_back(parse_formulation(f));
  const std::vector<BenchRow> rows = run_bench(config);
  std::ostringstream csv;
  write_bench_csv(csv, rows);
  if (out_path.empty()) {
    out << csv.str();
  } else {
    write_text(out_path, csv.str());
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stable kidney exchange solver", "stablekep"};
  app.require_subcommand(1);

  int pairs = 0;
  std::uint64_t seed = 1;
  std::string prefs = "strict";
  int max_cycle = 2;
  int max_chain = -1;
  std::string gen_out;
  auto* gen = app.add_subcommand("generate", "Generate a random pool");
  gen->add_option("--pairs", pairs, "number of patient-donor pairs")
      ->required()
      ->check(CLI::PositiveNumber);
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--mode", prefs, "strict or weak preferences")
      ->check(CLI::IsMember({"strict", "weak"}));
  gen->add_option("--K", max_cycle, "maximum cycle length")->check(CLI::Range(2, 16));
  gen->add_option("--L", max_chain, "maximum chain length, NDD included (default K)")
      ->check(CLI::Range(2, 16));
  gen->add_option("--out", gen_out, "instance file")->required();

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Find an optimal stable exchange");
  solve->add_option("--instance", solve_args.instance, "instance file")->required();
  add_solver_flags(solve, solve_args);
  solve->add_option("--out", solve_args.out, "report file (default: stdout)");

  std::string v_instance;
  std::string v_exchange;
  std::string v_out;
  auto* ver = app.add_subcommand("verify", "Census of blocking cycles for an exchange");
  ver->add_option("--instance", v_instance, "instance file")->required();
  ver->add_option("--exchange", v_exchange, "exchange file")->required();
  ver->add_option("--out", v_out, "report file (default: stdout)");

  SolveArgs sweep_args;
  std::vector<std::string> kappas{"0", "0.05", "0.1", "0.15", "0.2", "1"};
  std::string svg_path;
  auto* sweep = app.add_subcommand("sweep", "Blocking cycles against transplant loss budget");
  sweep->add_option("--instance", sweep_args.instance, "instance file")->required();
  add_solver_flags(sweep, sweep_args);
  sweep->add_option("--kappas", kappas, "comma-separated budgets in [0, 1]")->delimiter(',');
  sweep->add_option("--out", sweep_args.out, "CSV file (default: stdout)");
  sweep->add_option("--svg", svg_path, "SVG chart file");

  BenchConfig bench_config;
  std::string bench_prefs = "strict";
  std::vector<std::string> bench_forms{"cf"};
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "Compare formulations over generated pools");
  bench->add_option("--sizes", bench_config.sizes, "comma-separated pool sizes")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  bench->add_option("--per-size", bench_config.per_size, "instances per size")
      ->check(CLI::PositiveNumber);
  bench->add_option("--K", bench_config.max_cycle, "maximum cycle length")
      ->check(CLI::Range(2, 16));
  bench->add_option("--L", max_chain, "maximum chain length (default K)")
      ->check(CLI::Range(2, 16));
  bench->add_option("--prefs", bench_prefs, "strict or weak")
      ->check(CLI::IsMember({"strict", "weak"}));
  bench->add_option("--formulations", bench_forms, "comma-separated: ef, cf, cef")
      ->delimiter(',')
      ->check(CLI::IsMember({"ef", "cf", "cef"}));
  bench->add_option("--modes", bench_config.modes, "comma-separated: stable, strong")
      ->delimiter(',')
      ->check(CLI::IsMember({"stable", "strong"}));
  bench->add_option("--seed", bench_config.seed, "base seed");
  bench->add_option("--time-limit", bench_config.time_limit_seconds, "seconds per solve")
      ->check(CLI::PositiveNumber);
  bench->add_option("--threads", bench_config.threads, "worker threads")
      ->check(CLI::PositiveNumber);
  bench->add_option("--out", bench_out, "CSV file (default: stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) {
      return cmd_generate(pairs, seed, prefs, max_cycle, max_chain < 0 ? max_cycle : max_chain,
                          gen_out, out);
    }
    if (*solve) return cmd_solve(solve_args, out, err);
    if (*ver) return cmd_verify(v_instance, v_exchange, v_out, out, err);
    if (*sweep) return cmd_sweep(sweep_args, kappas, svg_path, out);
    if (*bench) {
      bench_config.max_chain = max_chain < 0 ? bench_config.max_cycle : max_chain;
      return cmd_bench(bench_config, bench_prefs, bench_forms, bench_out, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace stablekep
