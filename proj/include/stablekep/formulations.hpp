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

#ifndef STABLEKEP_FORMULATIONS_HPP_
#define STABLEKEP_FORMULATIONS_HPP_

#include <optional>
#include <string>
#include <vector>

#include "stablekep/enumerate.hpp"
#include "stablekep/instance.hpp"
#include "stablekep/milp.hpp"
#include "stablekep/prefs.hpp"
#include "stablekep/rational.hpp"
#include "stablekep/stability.hpp"

namespace stablekep {

// kUnconstrained builds the plain maximum-exchange model (no stability rows).
enum class StabilityMode { kUnconstrained, kStable, kStronglyStableStrict, kStronglyStableWeak };

enum class Formulation { kEdge, kCycle, kCycleEdge };

// Objective of the cycle-edge model: cycle weights or non-dummy arc sum.
enum class ObjectiveFamily { kX, kY };

const char* to_string(StabilityMode mode);
const char* to_string(Formulation formulation);
StabilityMode parse_stability_mode(const std::string& text, PreferenceMode prefs);
Formulation parse_formulation(const std::string& text);

// The strong-stability mode that matches the instance's preference kind.
StabilityMode strong_mode_for(PreferenceMode prefs);

// True when modes of this kind certify via the weakly blocking census.
bool is_strong(StabilityMode mode);

struct BuildArtifacts {
  MilpModel model;
  Formulation formulation = Formulation::kCycle;
  StabilityMode mode = StabilityMode::kStable;
  ObjectiveFamily objective = ObjectiveFamily::kX;
  // Indexed by cycle; -1 where absent.
  std::vector<int> cycle_var;
  std::vector<int> stability_row;
  std::vector<int> tau_var;
  // Indexed by instance arc; -1 where absent.
  std::vector<int> arc_var;
  std::vector<int> arc_cycle_var;
  std::vector<int> arc_chain_var;
  std::optional<int> budget_row;
  bool relaxed = false;
};

BuildArtifacts build_ef(const Instance& instance, const std::vector<Cycle>& cycles,
                        const PathSets& paths, StabilityMode mode);
BuildArtifacts build_cf(const Instance& instance, const std::vector<Cycle>& cycles,
                        const CyclePrefSets& prefs, StabilityMode mode);
BuildArtifacts build_cef(const Instance& instance, const std::vector<Cycle>& cycles,
                         StabilityMode mode, ObjectiveFamily objective = ObjectiveFamily::kX);

// Enumerates whatever the formulation needs and dispatches.
BuildArtifacts build(const Instance& instance, const std::vector<Cycle>& cycles,
                     Formulation formulation, StabilityMode mode,
                     ObjectiveFamily objective = ObjectiveFamily::kX);

// Smallest transplant count the relaxed model must reach:
// ceil(m_star - kappa * m_star).
std::int64_t transplant_floor(int m_star, const Rational& kappa);

// Minimise |V| * sum(tau) - base objective, with every stability row
// a u >= b turned into a u + b tau >= b and a budget row on the base
// objective. `base` must carry stability rows.
BuildArtifacts build_relaxed(const Instance& instance, const BuildArtifacts& base, int m_star,
                             const Rational& kappa);

// Exchange encoded by an assignment of the artifacts' model.
Exchange decode(const Instance& instance, const std::vector<Cycle>& cycles,
                const BuildArtifacts& artifacts, const MilpSolution& solution);

}  // namespace stablekep

#endif  // STABLEKEP_FORMULATIONS_HPP_
