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

#include "stablekep/oracle.hpp"

#include "stablekep/errors.hpp"

namespace stablekep {
namespace {

void recurse(const std::vector<Cycle>& cycles, std::size_t next, std::vector<char>& used,
             std::vector<int>& chosen, const std::function<void(const Exchange&)>& visit) {
  if (next == cycles.size()) {
    visit(Exchange{chosen});
    return;
  }
  recurse(cycles, next + 1, used, chosen, visit);
  const Cycle& c = cycles[next];
  for (VertexId v : c.vertices) {
    if (used[v]) return;
  }
  for (VertexId v : c.vertices) used[v] = 1;
  chosen.push_back(static_cast<int>(next));
  recurse(cycles, next + 1, used, chosen, visit);
  chosen.pop_back();
  for (VertexId v : c.vertices) used[v] = 0;
}

}  // namespace

void for_each_exchange(const Instance& instance, const std::vector<Cycle>& cycles,
                       const std::function<void(const Exchange&)>& visit) {
  if (static_cast<int>(cycles.size()) > kOracleCycleLimit) {
    throw GuardExceeded("oracle refuses " + std::to_string(cycles.size()) + " cycles (limit " +
                        std::to_string(kOracleCycleLimit) + ")");
  }
  std::vector<char> used(instance.num_vertices(), 0);
  std::vector<int> chosen;
  recurse(cycles, 0, used, chosen, visit);
}

std::vector<Exchange> all_exchanges(const Instance& instance, const std::vector<Cycle>& cycles) {
  std::vector<Exchange> out;
  for_each_exchange(instance, cycles, [&](const Exchange& e) { out.push_back(e); });
  return out;
}

int blocking_count(const Instance& instance, const std::vector<Cycle>& cycles,
                   const Exchange& exchange, StabilityMode mode) {
  switch (mode) {
    case StabilityMode::kUnconstrained:
      return 0;
    case StabilityMode::kStable:
      return static_cast<int>(find_blocking(instance, cycles, exchange).size());
    case StabilityMode::kStronglyStableStrict:
    case StabilityMode::kStronglyStableWeak:
      return static_cast<int>(find_weakly_blocking(instance, cycles, exchange).size());
  }
  return 0;
}

bool satisfies_mode(const Instance& instance, const std::vector<Cycle>& cycles,
                    const Exchange& exchange, StabilityMode mode) {
  return blocking_count(instance, cycles, exchange, mode) == 0;
}

OracleOptimum oracle_optimum(const Instance& instance, const std::vector<Cycle>& cycles,
                             StabilityMode mode) {
  OracleOptimum best;
  for_each_exchange(instance, cycles, [&](const Exchange& e) {
    const int t = transplants(cycles, e);
    if (best.witness && t <= best.objective) return;
    if (!satisfies_mode(instance, cycles, e, mode)) return;
    best.objective = t;
    best.witness = e;
  });
  return best;
}

OracleMinBlocking oracle_min_blocking(const Instance& instance, const std::vector<Cycle>& cycles,
                                      StabilityMode mode, const Rational& budget, int m_star) {
  const std::int64_t floor = (Rational(m_star) - budget).ceil();
  std::optional<OracleMinBlocking> best;
  for_each_exchange(instance, cycles, [&](const Exchange& e) {
    const int t = transplants(cycles, e);
    if (t < floor) return;
    const int b = blocking_count(instance, cycles, e, mode);
    if (best && (b > best->blocking || (b == best->blocking && t <= best->transplants))) return;
    best = OracleMinBlocking{b, t, e};
  });
  if (!best) throw InvalidArgument("no exchange reaches the transplant budget");
  return *best;
}

}  // namespace stablekep
