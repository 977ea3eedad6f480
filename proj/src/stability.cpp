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

#include "stablekep/stability.hpp"

#include <algorithm>

#include "json.hpp"
#include "stablekep/errors.hpp"

namespace stablekep {
namespace {

void check_indices(const std::vector<Cycle>& cycles, const Exchange& exchange) {
  for (int c : exchange.cycle_indices) {
    if (c < 0 || c >= static_cast<int>(cycles.size())) {
      throw InvalidArgument("cycle index " + std::to_string(c) + " out of range");
    }
  }
}

// Rank of the matched in-arc of v, or nullopt when v is unmatched.
std::optional<int> matched_rank(const Instance& instance,
                                const std::vector<std::optional<VertexId>>& matched, VertexId v) {
  if (!matched[v]) return std::nullopt;
  return instance.rank(*matched[v], v);
}

}  // namespace

Exchange make_exchange(std::vector<int> cycle_indices) {
  std::sort(cycle_indices.begin(), cycle_indices.end());
  cycle_indices.erase(std::unique(cycle_indices.begin(), cycle_indices.end()),
                      cycle_indices.end());
  return Exchange{std::move(cycle_indices)};
}

int transplants(const std::vector<Cycle>& cycles, const Exchange& exchange) {
  int total = 0;
  for (int c : exchange.cycle_indices) total += cycles.at(c).weight;
  return total;
}

bool check_feasible(const Instance& instance, const std::vector<Cycle>& cycles,
                    const Exchange& exchange) {
  check_indices(cycles, exchange);
  std::vector<char> used(instance.num_vertices(), 0);
  for (std::size_t k = 0; k < exchange.cycle_indices.size(); ++k) {
    if (k > 0 && exchange.cycle_indices[k] == exchange.cycle_indices[k - 1]) return false;
    for (VertexId v : cycles[exchange.cycle_indices[k]].vertices) {
      if (used[v]) return false;
      used[v] = 1;
    }
  }
  return true;
}

std::vector<std::optional<VertexId>> matched_in_arcs(const Instance& instance,
                                                     const std::vector<Cycle>& cycles,
                                                     const Exchange& exchange) {
  if (!check_feasible(instance, cycles, exchange)) {
    throw InvalidArgument("exchange cycles are not vertex-disjoint");
  }
  std::vector<std::optional<VertexId>> matched(instance.num_vertices());
  for (int c : exchange.cycle_indices) {
    const Cycle& cyc = cycles[c];
    for (int pos = 0; pos < cyc.size(); ++pos) matched[cyc.vertices[pos]] = cyc.predecessor(pos);
  }
  return matched;
}

std::vector<int> find_blocking(const Instance& instance, const std::vector<Cycle>& cycles,
                               const Exchange& exchange) {
  const auto matched = matched_in_arcs(instance, cycles, exchange);
  std::vector<int> out;
  for (int c = 0; c < static_cast<int>(cycles.size()); ++c) {
    const Cycle& cyc = cycles[c];
    bool escaped = false;
    for (int pos = 0; pos < cyc.size() && !escaped; ++pos) {
      const VertexId j = cyc.vertices[pos];
      const auto have = matched_rank(instance, matched, j);
      escaped = have && *have <= instance.rank(cyc.predecessor(pos), j);
    }
    if (!escaped) out.push_back(c);
  }
  return out;
}

std::vector<int> find_weakly_blocking(const Instance& instance, const std::vector<Cycle>& cycles,
                                      const Exchange& exchange) {
  const auto matched = matched_in_arcs(instance, cycles, exchange);
  std::vector<char> in_exchange(cycles.size(), 0);
  for (int c : exchange.cycle_indices) in_exchange[c] = 1;
  std::vector<int> out;
  for (int c = 0; c < static_cast<int>(cycles.size()); ++c) {
    if (in_exchange[c]) continue;
    const Cycle& cyc = cycles[c];
    bool all_equal = true;
    bool some_better = false;
    for (int pos = 0; pos < cyc.size(); ++pos) {
      const VertexId j = cyc.vertices[pos];
      const auto have = matched_rank(instance, matched, j);
      const int offered = instance.rank(cyc.predecessor(pos), j);
      if (!have || *have != offered) all_equal = false;
      if (have && *have < offered) some_better = true;
    }
    if (!all_equal && !some_better) out.push_back(c);
  }
  return out;
}

StabilityReport verify(const Instance& instance, const std::vector<Cycle>& cycles,
                       const Exchange& exchange) {
  StabilityReport report;
  report.feasible = check_feasible(instance, cycles, exchange);
  if (!report.feasible) return report;
  report.transplants = transplants(cycles, exchange);
  report.blocking = find_blocking(instance, cycles, exchange);
  report.weakly_blocking = find_weakly_blocking(instance, cycles, exchange);
  return report;
}

std::string to_json(const StabilityReport& report) {
  nlohmann::json doc;
  doc["feasible"] = report.feasible;
  doc["transplants"] = report.transplants;
  doc["blocking"] = report.blocking;
  doc["weakly_blocking"] = report.weakly_blocking;
  return doc.dump(2) + "\n";
}

double price_of_stability(int m_star, int m_s) {
  if (m_star <= 0) throw InvalidArgument("price of stability needs m_star > 0");
  if (m_s < 0 || m_s > m_star) throw InvalidArgument("price of stability needs 0 <= m_s <= m_star");
  return static_cast<double>(m_star - m_s) / m_star * 100.0;
}

}  // namespace stablekep
