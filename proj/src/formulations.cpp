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

#include "stablekep/formulations.hpp"

#include <algorithm>
#include <map>

#include "stablekep/errors.hpp"

namespace stablekep {
namespace {

std::string arc_name(const char* prefix, const Arc& a) {
  return std::string(prefix) + "_" + std::to_string(a.from) + "_" + std::to_string(a.to);
}

std::string cycle_suffix(int c) { return "c" + std::to_string(c); }

void check_mode(const Instance& instance, StabilityMode mode) {
  if (mode == StabilityMode::kStronglyStableStrict && instance.mode() != PreferenceMode::kStrict) {
    throw InvalidArgument("strongly stable (strict) mode needs strict preferences");
  }
  if (mode == StabilityMode::kStronglyStableWeak && instance.mode() != PreferenceMode::kWeak) {
    throw InvalidArgument("strongly stable (weak) mode needs weak preferences");
  }
}

int arc_index(const Instance& instance, VertexId from, VertexId to) {
  auto a = instance.find_arc(from, to);
  if (!a) throw InvalidArgument("cycle uses a missing arc");
  return *a;
}

// Stability row of cycle c over arc variables.
void add_edge_stability_row(MilpModel& model, const Instance& instance, const Cycle& cycle,
                            int c, StabilityMode mode, const std::vector<int>& arc_var,
                            std::vector<int>& stability_row) {
  const auto& arcs = instance.arcs();
  const std::int64_t len = cycle.size();
  std::vector<Term> terms;
  for (const auto& [i, j] : cycle.arcs()) {
    const int r = instance.rank(i, j);
    for (int idx : instance.in_arcs(j)) {
      const Arc& in = arcs[idx];
      switch (mode) {
        case StabilityMode::kStable:
          if (in.rank <= r) terms.push_back({arc_var[idx], 1});
          break;
        case StabilityMode::kStronglyStableStrict:
          if (in.from == i) {
            terms.push_back({arc_var[idx], 1});
          } else if (in.rank < r) {
            terms.push_back({arc_var[idx], len});
          }
          break;
        case StabilityMode::kStronglyStableWeak:
          if (in.from == i || in.rank == r) {
            terms.push_back({arc_var[idx], 1});
          } else if (in.rank < r) {
            terms.push_back({arc_var[idx], len});
          }
          break;
        case StabilityMode::kUnconstrained:
          return;
      }
    }
  }
  const Rational rhs = mode == StabilityMode::kStable ? Rational(1) : Rational(len);
  stability_row[c] = model.add_constraint("stab_" + cycle_suffix(c), std::move(terms),
                                          RowSense::kGreaterEqual, rhs);
}

void add_packing_rows(MilpModel& model, const Instance& instance,
                      const std::vector<Cycle>& cycles, const std::vector<int>& cycle_var) {
  const auto by_vertex = cycles_by_vertex(cycles, instance.num_vertices());
  for (VertexId v = 0; v < instance.num_vertices(); ++v) {
    if (by_vertex[v].empty()) continue;
    std::vector<Term> terms;
    for (int c : by_vertex[v]) terms.push_back({cycle_var[c], 1});
    model.add_constraint("pack_v" + std::to_string(v), std::move(terms), RowSense::kLessEqual, 1);
  }
}

std::vector<int> sorted_union(const std::vector<const std::vector<int>*>& lists) {
  std::vector<int> out;
  for (const auto* l : lists) out.insert(out.end(), l->begin(), l->end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

const char* to_string(StabilityMode mode) {
  switch (mode) {
    case StabilityMode::kUnconstrained:
      return "unconstrained";
    case StabilityMode::kStable:
      return "stable";
    case StabilityMode::kStronglyStableStrict:
      return "strong-strict";
    case StabilityMode::kStronglyStableWeak:
      return "strong-weak";
  }
  return "unknown";
}

const char* to_string(Formulation formulation) {
  switch (formulation) {
    case Formulation::kEdge:
      return "ef";
    case Formulation::kCycle:
      return "cf";
    case Formulation::kCycleEdge:
      return "cef";
  }
  return "unknown";
}

StabilityMode strong_mode_for(PreferenceMode prefs) {
  return prefs == PreferenceMode::kStrict ? StabilityMode::kStronglyStableStrict
                                          : StabilityMode::kStronglyStableWeak;
}

bool is_strong(StabilityMode mode) {
  return mode == StabilityMode::kStronglyStableStrict ||
         mode == StabilityMode::kStronglyStableWeak;
}

StabilityMode parse_stability_mode(const std::string& text, PreferenceMode prefs) {
  if (text == "stable") return StabilityMode::kStable;
  if (text == "strong") return strong_mode_for(prefs);
  if (text == "unconstrained" || text == "none") return StabilityMode::kUnconstrained;
  if (text == "strong-strict") return StabilityMode::kStronglyStableStrict;
  if (text == "strong-weak") return StabilityMode::kStronglyStableWeak;
  throw InvalidArgument("unknown stability mode '" + text + "'");
}

Formulation parse_formulation(const std::string& text) {
  if (text == "ef") return Formulation::kEdge;
  if (text == "cf") return Formulation::kCycle;
  if (text == "cef") return Formulation::kCycleEdge;
  throw InvalidArgument("unknown formulation '" + text + "'");
}

BuildArtifacts build_ef(const Instance& instance, const std::vector<Cycle>& cycles,
                        const PathSets& paths, StabilityMode mode) {
  check_mode(instance, mode);
  BuildArtifacts art;
  art.formulation = Formulation::kEdge;
  art.mode = mode;
  art.objective = ObjectiveFamily::kY;
  MilpModel& m = art.model;
  const auto& arcs = instance.arcs();
  const int num_arcs = instance.num_arcs();
  art.arc_var.assign(num_arcs, -1);
  art.arc_cycle_var.assign(num_arcs, -1);
  art.arc_chain_var.assign(num_arcs, -1);
  art.stability_row.assign(cycles.size(), -1);

  for (int a = 0; a < num_arcs; ++a) {
    art.arc_var[a] = m.add_variable(arc_name("y", arcs[a]), VarKind::kBinary,
                                    arcs[a].dummy ? 0 : 1);
  }
  for (int a = 0; a < num_arcs; ++a) {
    if (instance.is_ndd(arcs[a].from) || instance.is_ndd(arcs[a].to)) continue;
    art.arc_cycle_var[a] = m.add_variable(arc_name("yc", arcs[a]), VarKind::kBinary);
  }
  for (int a = 0; a < num_arcs; ++a) {
    art.arc_chain_var[a] = m.add_variable(arc_name("yn", arcs[a]), VarKind::kBinary);
  }

  for (VertexId v = 0; v < instance.num_vertices(); ++v) {
    if (instance.out_arcs(v).empty()) continue;
    std::vector<Term> terms;
    for (int a : instance.out_arcs(v)) terms.push_back({art.arc_var[a], 1});
    m.add_constraint("out_v" + std::to_string(v), std::move(terms), RowSense::kLessEqual, 1);
  }
  for (int a = 0; a < num_arcs; ++a) {
    std::vector<Term> terms{{art.arc_var[a], 1}, {art.arc_chain_var[a], -1}};
    if (art.arc_cycle_var[a] >= 0) terms.push_back({art.arc_cycle_var[a], -1});
    m.add_constraint(arc_name("split", arcs[a]), std::move(terms), RowSense::kEqual, 0);
  }
  for (int family = 0; family < 2; ++family) {
    const auto& vars = family == 0 ? art.arc_cycle_var : art.arc_chain_var;
    for (VertexId v = 0; v < instance.num_vertices(); ++v) {
      std::vector<Term> terms;
      for (int a : instance.in_arcs(v)) {
        if (vars[a] >= 0) terms.push_back({vars[a], 1});
      }
      for (int a : instance.out_arcs(v)) {
        if (vars[a] >= 0) terms.push_back({vars[a], -1});
      }
      if (terms.empty()) continue;
      m.add_constraint((family == 0 ? "flowc_v" : "flown_v") + std::to_string(v),
                       std::move(terms), RowSense::kEqual, 0);
    }
  }
  int path_id = 0;
  for (int family = 0; family < 2; ++family) {
    const auto& list = family == 0 ? paths.pair_paths : paths.ndd_paths;
    const auto& vars = family == 0 ? art.arc_cycle_var : art.arc_chain_var;
    for (const Path& p : list) {
      std::vector<Term> terms;
      for (int k = 0; k + 1 < static_cast<int>(p.vertices.size()); ++k) {
        terms.push_back({vars[arc_index(instance, p.vertices[k], p.vertices[k + 1])], 1});
      }
      m.add_constraint("path_p" + std::to_string(path_id++), std::move(terms),
                       RowSense::kLessEqual, p.num_arcs() - 1);
    }
  }
  int guard_id = 0;
  for (const ChainGuard& g : enumerate_chain_guards(instance)) {
    std::vector<Term> terms;
    for (const auto& [from, to] : g.arcs()) {
      terms.push_back({art.arc_chain_var[arc_index(instance, from, to)], 1});
    }
    m.add_constraint("guard_g" + std::to_string(guard_id++), std::move(terms),
                     RowSense::kLessEqual, g.rhs);
  }
  if (mode != StabilityMode::kUnconstrained) {
    for (int c = 0; c < static_cast<int>(cycles.size()); ++c) {
      add_edge_stability_row(m, instance, cycles[c], c, mode, art.arc_var, art.stability_row);
    }
  }
  return art;
}

BuildArtifacts build_cf(const Instance& instance, const std::vector<Cycle>& cycles,
                        const CyclePrefSets& prefs, StabilityMode mode) {
  check_mode(instance, mode);
  if (prefs.num_cycles() != static_cast<int>(cycles.size())) {
    throw InvalidArgument("preference sets were built for a different cycle list");
  }
  BuildArtifacts art;
  art.formulation = Formulation::kCycle;
  art.mode = mode;
  art.objective = ObjectiveFamily::kX;
  MilpModel& m = art.model;
  const int n = static_cast<int>(cycles.size());
  art.cycle_var.assign(n, -1);
  art.stability_row.assign(n, -1);
  for (int c = 0; c < n; ++c) {
    art.cycle_var[c] = m.add_variable("x_" + cycle_suffix(c), VarKind::kBinary, cycles[c].weight);
  }
  add_packing_rows(m, instance, cycles, art.cycle_var);
  if (mode == StabilityMode::kUnconstrained) return art;

  for (int c = 0; c < n; ++c) {
    const Cycle& cyc = cycles[c];
    std::vector<const std::vector<int>*> weak;
    std::vector<const std::vector<int>*> strict;
    bool empty_e = false;
    for (int pos = 0; pos < cyc.size(); ++pos) {
      const auto& e = prefs.at(c, pos);
      weak.push_back(&e.weakly_better);
      strict.push_back(&e.strictly_better);
      empty_e |= e.equally_good.empty();
    }
    std::map<int, Rational> coeff;
    coeff[c] = 1;
    if (mode == StabilityMode::kStable) {
      for (int s : sorted_union(weak)) coeff[s] += 1;
    } else {
      for (int s : sorted_union(strict)) coeff[s] += 1;
      if (mode == StabilityMode::kStronglyStableWeak && !empty_e) {
        const Rational share(1, cyc.size());
        for (int pos = 0; pos < cyc.size(); ++pos) {
          for (int s : prefs.at(c, pos).equally_good) coeff[s] += share;
        }
      }
    }
    std::vector<Term> terms;
    for (const auto& [s, a] : coeff) terms.push_back({art.cycle_var[s], a});
    art.stability_row[c] = m.add_constraint("stab_" + cycle_suffix(c), std::move(terms),
                                            RowSense::kGreaterEqual, 1);
  }
  return art;
}

BuildArtifacts build_cef(const Instance& instance, const std::vector<Cycle>& cycles,
                         StabilityMode mode, ObjectiveFamily objective) {
  check_mode(instance, mode);
  BuildArtifacts art;
  art.formulation = Formulation::kCycleEdge;
  art.mode = mode;
  art.objective = objective;
  MilpModel& m = art.model;
  const auto& arcs = instance.arcs();
  const int n = static_cast<int>(cycles.size());
  art.cycle_var.assign(n, -1);
  art.stability_row.assign(n, -1);
  art.arc_var.assign(instance.num_arcs(), -1);
  art.arc_cycle_var.assign(instance.num_arcs(), -1);
  art.arc_chain_var.assign(instance.num_arcs(), -1);
  for (int c = 0; c < n; ++c) {
    art.cycle_var[c] = m.add_variable("x_" + cycle_suffix(c), VarKind::kBinary,
                                      objective == ObjectiveFamily::kX ? cycles[c].weight : 0);
  }
  for (int a = 0; a < instance.num_arcs(); ++a) {
    const int w = objective == ObjectiveFamily::kY && !arcs[a].dummy ? 1 : 0;
    art.arc_var[a] = m.add_variable(arc_name("y", arcs[a]), VarKind::kContinuous, w);
  }
  add_packing_rows(m, instance, cycles, art.cycle_var);
  std::vector<std::vector<int>> cycles_on_arc(instance.num_arcs());
  for (int c = 0; c < n; ++c) {
    for (const auto& [i, j] : cycles[c].arcs()) cycles_on_arc[arc_index(instance, i, j)].push_back(c);
  }
  for (int a = 0; a < instance.num_arcs(); ++a) {
    std::vector<Term> terms;
    for (int c : cycles_on_arc[a]) terms.push_back({art.cycle_var[c], 1});
    terms.push_back({art.arc_var[a], -1});
    m.add_constraint(arc_name("link", arcs[a]), std::move(terms), RowSense::kEqual, 0);
  }
  if (mode != StabilityMode::kUnconstrained) {
    for (int c = 0; c < n; ++c) {
      add_edge_stability_row(m, instance, cycles[c], c, mode, art.arc_var, art.stability_row);
    }
  }
  return art;
}

BuildArtifacts build(const Instance& instance, const std::vector<Cycle>& cycles,
                     Formulation formulation, StabilityMode mode, ObjectiveFamily objective) {
  switch (formulation) {
    case Formulation::kEdge:
      return build_ef(instance, cycles, enumerate_paths(instance), mode);
    case Formulation::kCycle:
      return build_cf(instance, cycles, build_pref_sets(instance, cycles), mode);
    case Formulation::kCycleEdge:
      return build_cef(instance, cycles, mode, objective);
  }
  throw InvalidArgument("unknown formulation");
}

std::int64_t transplant_floor(int m_star, const Rational& kappa) {
  if (kappa < Rational(0) || kappa > Rational(1)) {
    throw InvalidArgument("kappa must lie in [0, 1], got " + kappa.to_string());
  }
  if (m_star < 0) throw InvalidArgument("m_star must be nonnegative");
  return (Rational(m_star) - kappa * Rational(m_star)).ceil();
}

BuildArtifacts build_relaxed(const Instance& instance, const BuildArtifacts& base, int m_star,
                             const Rational& kappa) {
  if (base.mode == StabilityMode::kUnconstrained) {
    throw InvalidArgument("the relaxed model needs a base with stability rows");
  }
  if (base.relaxed) throw InvalidArgument("base model is already relaxed");
  const std::int64_t floor = transplant_floor(m_star, kappa);
  BuildArtifacts art = base;
  art.relaxed = true;
  const MilpModel& src = base.model;
  MilpModel m(ObjectiveSense::kMinimize);
  std::vector<Term> transplants;
  for (const Variable& v : src.variables()) {
    const int id = m.add_variable(v.name, v.kind, -v.objective);
    if (v.upper) m.set_upper(id, *v.upper);
    if (!v.objective.is_zero()) transplants.push_back({id, v.objective});
  }
  const Rational weight(instance.num_vertices());
  const int n = static_cast<int>(base.stability_row.size());
  art.tau_var.assign(n, -1);
  std::vector<int> row_cycle(src.num_constraints(), -1);
  for (int c = 0; c < n; ++c) {
    if (base.stability_row[c] < 0) continue;
    row_cycle[base.stability_row[c]] = c;
    art.tau_var[c] = m.add_variable("tau_" + cycle_suffix(c), VarKind::kBinary, weight);
  }
  for (int r = 0; r < src.num_constraints(); ++r) {
    const Constraint& row = src.constraint(r);
    std::vector<Term> terms = row.terms;
    if (row_cycle[r] >= 0) terms.push_back({art.tau_var[row_cycle[r]], row.rhs});
    m.add_constraint(row.name, std::move(terms), row.sense, row.rhs);
  }
  art.budget_row = m.add_constraint("budget", std::move(transplants), RowSense::kGreaterEqual,
                                    Rational(floor));
  art.model = std::move(m);
  return art;
}

Exchange decode(const Instance& instance, const std::vector<Cycle>& cycles,
                const BuildArtifacts& artifacts, const MilpSolution& solution) {
  if (!solution.has_assignment()) throw DecodeError("solution carries no assignment");
  if (static_cast<int>(solution.values.size()) != artifacts.model.num_variables()) {
    throw DecodeError("solution does not match the model");
  }
  std::vector<int> chosen;
  if (artifacts.formulation != Formulation::kEdge) {
    for (int c = 0; c < static_cast<int>(artifacts.cycle_var.size()); ++c) {
      const Rational& x = solution.values[artifacts.cycle_var[c]];
      if (x == Rational(1)) {
        chosen.push_back(c);
      } else if (!x.is_zero()) {
        throw DecodeError("cycle variable x_c" + std::to_string(c) + " is fractional");
      }
    }
  } else {
    std::map<std::vector<VertexId>, int> lookup;
    for (int c = 0; c < static_cast<int>(cycles.size()); ++c) lookup[cycles[c].vertices] = c;
    std::vector<VertexId> next(instance.num_vertices(), -1);
    const auto& arcs = instance.arcs();
    for (int a = 0; a < instance.num_arcs(); ++a) {
      const Rational& y = solution.values[artifacts.arc_var[a]];
      if (y.is_zero()) continue;
      if (y != Rational(1)) throw DecodeError("arc variable is fractional");
      if (next[arcs[a].from] >= 0) throw DecodeError("vertex donates twice");
      next[arcs[a].from] = arcs[a].to;
    }
    std::vector<char> seen(instance.num_vertices(), 0);
    for (VertexId s = 0; s < instance.num_vertices(); ++s) {
      if (seen[s] || next[s] < 0) continue;
      std::vector<VertexId> walk;
      VertexId v = s;
      while (!seen[v]) {
        seen[v] = 1;
        walk.push_back(v);
        v = next[v];
        if (v < 0) throw DecodeError("arc support does not close into cycles");
      }
      if (v != s) throw DecodeError("arc support does not close into cycles");
      Cycle cyc;
      try {
        cyc = make_cycle(instance, walk);
      } catch (const ValidationError& e) {
        throw DecodeError(std::string("arc support is not an allowed cycle: ") + e.what());
      }
      auto it = lookup.find(cyc.vertices);
      if (it == lookup.end()) throw DecodeError("decoded cycle " + format_cycle(cyc) + " is unknown");
      chosen.push_back(it->second);
    }
  }
  Exchange exchange = make_exchange(std::move(chosen));
  if (!check_feasible(instance, cycles, exchange)) {
    throw DecodeError("decoded cycles overlap");
  }
  if (!artifacts.relaxed) {
    const Rational total = artifacts.model.objective_value(solution.values);
    if (total != Rational(transplants(cycles, exchange))) {
      throw DecodeError("objective " + total.to_string() + " differs from the transplant count");
    }
  }
  return exchange;
}

}  // namespace stablekep
