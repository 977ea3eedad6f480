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

#include "stablekep/enumerate.hpp"

#include <algorithm>
#include <functional>
#include <ostream>
#include <sstream>

#include "stablekep/errors.hpp"

namespace stablekep {
namespace {

// Out-neighbours of u restricted to pair vertices (so dummy arcs never
// appear), in increasing id order.
template <typename Fn>
void for_each_pair_successor(const Instance& instance, VertexId u, Fn&& fn) {
  for (int k : instance.out_arcs(u)) {
    const VertexId v = instance.arcs()[k].to;
    if (!instance.is_ndd(v)) fn(v);
  }
}

bool on_path(const std::vector<VertexId>& path, VertexId v) {
  return std::find(path.begin(), path.end(), v) != path.end();
}

// Simple paths with exactly `arcs` arcs starting at `start`, continuing
// through pair vertices only.
void simple_paths_from(const Instance& instance, VertexId start, int arcs,
                       std::vector<std::vector<VertexId>>& out) {
  std::vector<VertexId> path{start};
  std::function<void(VertexId)> extend = [&](VertexId u) {
    if (static_cast<int>(path.size()) == arcs + 1) {
      out.push_back(path);
      return;
    }
    for_each_pair_successor(instance, u, [&](VertexId v) {
      if (on_path(path, v)) return;
      path.push_back(v);
      extend(v);
      path.pop_back();
    });
  };
  extend(start);
}

}  // namespace

int Cycle::position(VertexId v) const {
  for (int k = 0; k < size(); ++k) {
    if (vertices[k] == v) return k;
  }
  return -1;
}

std::vector<std::pair<VertexId, VertexId>> Cycle::arcs() const {
  std::vector<std::pair<VertexId, VertexId>> out;
  out.reserve(vertices.size());
  for (int k = 0; k < size(); ++k) out.emplace_back(vertices[k], successor(k));
  return out;
}

std::vector<std::pair<VertexId, VertexId>> ChainGuard::arcs() const {
  std::vector<std::pair<VertexId, VertexId>> out;
  for (std::size_t k = 0; k + 1 < vertices.size(); ++k) {
    out.emplace_back(vertices[k], vertices[k + 1]);
  }
  if (closed) out.emplace_back(vertices.back(), vertices.front());
  return out;
}

Cycle make_cycle(const Instance& instance, std::vector<VertexId> vertices) {
  auto fail = [&](const std::string& why) -> Cycle {
    std::ostringstream msg;
    msg << "not a cycle (";
    for (std::size_t k = 0; k < vertices.size(); ++k) msg << (k ? "," : "") << vertices[k];
    msg << "): " << why;
    throw ValidationError(msg.str());
  };
  if (vertices.size() < 2) return fail("needs at least two vertices");
  for (VertexId v : vertices) {
    if (v < 0 || v >= instance.num_vertices()) return fail("unknown vertex");
  }
  std::vector<VertexId> sorted = vertices;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    return fail("repeated vertex");
  }
  const auto ndd_count = std::count_if(vertices.begin(), vertices.end(),
                                       [&](VertexId v) { return instance.is_ndd(v); });
  if (ndd_count > 1) return fail("more than one NDD");
  auto lead = ndd_count == 1 ? std::find_if(vertices.begin(), vertices.end(),
                                            [&](VertexId v) { return instance.is_ndd(v); })
                             : std::min_element(vertices.begin(), vertices.end());
  std::rotate(vertices.begin(), lead, vertices.end());
  Cycle c;
  c.vertices = std::move(vertices);
  c.kind = ndd_count == 1 ? CycleKind::kNddCycle : CycleKind::kPairCycle;
  c.weight = c.size() - static_cast<int>(ndd_count);
  for (const auto& [from, to] : c.arcs()) {
    if (!instance.find_arc(from, to)) {
      return fail("missing arc (" + std::to_string(from) + "," + std::to_string(to) + ")");
    }
  }
  const int limit = c.kind == CycleKind::kNddCycle ? instance.max_chain() : instance.max_cycle();
  if (c.size() > limit) return fail("longer than the length limit");
  return c;
}

std::vector<Cycle> enumerate_cycles(const Instance& instance) {
  std::vector<Cycle> cycles;
  std::vector<VertexId> path;
  std::function<void(VertexId, VertexId)> pair_dfs = [&](VertexId start, VertexId u) {
    for_each_pair_successor(instance, u, [&](VertexId v) {
      if (v == start && path.size() >= 2) {
        cycles.push_back(Cycle{path, CycleKind::kPairCycle, static_cast<int>(path.size())});
        return;
      }
      if (v <= start || on_path(path, v)) return;
      if (static_cast<int>(path.size()) >= instance.max_cycle()) return;
      path.push_back(v);
      pair_dfs(start, v);
      path.pop_back();
    });
  };
  std::function<void(VertexId, VertexId)> chain_dfs = [&](VertexId ndd, VertexId u) {
    if (u != ndd && instance.find_arc(u, ndd)) {
      cycles.push_back(Cycle{path, CycleKind::kNddCycle, static_cast<int>(path.size()) - 1});
    }
    if (static_cast<int>(path.size()) >= instance.max_chain()) return;
    for_each_pair_successor(instance, u, [&](VertexId v) {
      if (on_path(path, v)) return;
      path.push_back(v);
      chain_dfs(ndd, v);
      path.pop_back();
    });
  };
  for (VertexId s = 0; s < instance.num_vertices(); ++s) {
    path.assign(1, s);
    if (instance.is_ndd(s)) {
      chain_dfs(s, s);
    } else {
      pair_dfs(s, s);
    }
  }
  std::sort(cycles.begin(), cycles.end(),
            [](const Cycle& a, const Cycle& b) { return a.vertices < b.vertices; });
  return cycles;
}

PathSets enumerate_paths(const Instance& instance) {
  PathSets sets;
  std::vector<std::vector<VertexId>> raw;
  for (VertexId s = 0; s < instance.num_vertices(); ++s) {
    if (instance.is_ndd(s)) continue;
    raw.clear();
    simple_paths_from(instance, s, instance.max_cycle(), raw);
    for (auto& p : raw) sets.pair_paths.push_back(Path{std::move(p), PathKind::kPairPath});
  }
  for (VertexId s = 0; s < instance.num_vertices(); ++s) {
    if (!instance.is_ndd(s)) continue;
    raw.clear();
    simple_paths_from(instance, s, instance.max_chain(), raw);
    for (auto& p : raw) sets.ndd_paths.push_back(Path{std::move(p), PathKind::kNddPath});
  }
  return sets;
}

std::vector<ChainGuard> enumerate_chain_guards(const Instance& instance) {
  std::vector<ChainGuard> guards;
  // A chain serves at most L-1 pairs, so chain flow never covers a run of
  // `run` consecutive pair-to-pair arcs.
  const int run = std::max(1, instance.max_chain() - 1);
  std::vector<std::vector<VertexId>> raw;
  for (VertexId s = 0; s < instance.num_vertices(); ++s) {
    if (instance.is_ndd(s)) continue;
    raw.clear();
    simple_paths_from(instance, s, run, raw);
    for (auto& p : raw) guards.push_back(ChainGuard{std::move(p), false, run - 1});
  }
  // Pair-only cycles too long for K but too short for the run guard.
  if (run > instance.max_cycle()) {
    std::vector<VertexId> path;
    std::function<void(VertexId, VertexId)> dfs = [&](VertexId start, VertexId u) {
      for_each_pair_successor(instance, u, [&](VertexId v) {
        const int len = static_cast<int>(path.size());
        if (v == start && len > instance.max_cycle()) {
          guards.push_back(ChainGuard{path, true, len - 1});
          return;
        }
        if (v <= start || on_path(path, v) || len >= run) return;
        path.push_back(v);
        dfs(start, v);
        path.pop_back();
      });
    };
    for (VertexId s = 0; s < instance.num_vertices(); ++s) {
      if (instance.is_ndd(s)) continue;
      path.assign(1, s);
      dfs(s, s);
    }
  }
  // NDD -> pairs -> another NDD: a cycle may hold only one NDD.
  for (VertexId s = 0; s < instance.num_vertices(); ++s) {
    if (!instance.is_ndd(s)) continue;
    for (int pairs = 1; pairs <= instance.max_chain() - 1; ++pairs) {
      raw.clear();
      simple_paths_from(instance, s, pairs, raw);
      for (const auto& p : raw) {
        for (VertexId t = 0; t < instance.num_vertices(); ++t) {
          if (t == s || !instance.is_ndd(t)) continue;
          auto seq = p;
          seq.push_back(t);
          guards.push_back(ChainGuard{std::move(seq), false, pairs});
        }
      }
    }
  }
  return guards;
}

std::vector<int> cycles_through(const std::vector<Cycle>& cycles, VertexId v, int num_vertices) {
  if (v < 0 || v >= num_vertices) throw InvalidArgument("unknown vertex id " + std::to_string(v));
  std::vector<int> out;
  for (int c = 0; c < static_cast<int>(cycles.size()); ++c) {
    if (cycles[c].contains(v)) out.push_back(c);
  }
  return out;
}

std::vector<std::vector<int>> cycles_by_vertex(const std::vector<Cycle>& cycles,
                                               int num_vertices) {
  std::vector<std::vector<int>> out(num_vertices);
  for (int c = 0; c < static_cast<int>(cycles.size()); ++c) {
    for (VertexId v : cycles[c].vertices) out.at(v).push_back(c);
  }
  return out;
}

std::string format_cycle(const Cycle& cycle) {
  std::ostringstream line;
  line << (cycle.kind == CycleKind::kPairCycle ? "pair:" : "ndd:");
  for (int k = 0; k < cycle.size(); ++k) line << (k ? "," : "") << cycle.vertices[k];
  line << " weight=" << cycle.weight;
  return line.str();
}

void write_cycles(std::ostream& out, const std::vector<Cycle>& cycles) {
  for (const Cycle& c : cycles) out << format_cycle(c) << "\n";
}

}  // namespace stablekep
