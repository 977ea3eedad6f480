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

#include "stablekep/prefs.hpp"

#include "stablekep/errors.hpp"

namespace stablekep {

bool prefers(const Instance& instance, VertexId j, VertexId i, VertexId i2) {
  return instance.rank(i, j) < instance.rank(i2, j);
}

bool indifferent(const Instance& instance, VertexId j, VertexId i, VertexId i2) {
  return instance.rank(i, j) == instance.rank(i2, j);
}

int in_rank(const Instance& instance, const Cycle& c, VertexId v) {
  const int pos = c.position(v);
  if (pos < 0) throw InvalidArgument("vertex " + std::to_string(v) + " is not on the cycle");
  return instance.rank(c.predecessor(pos), v);
}

CyclePref cycle_pref(const Instance& instance, const std::vector<Cycle>& cycles, VertexId v,
                     int c, int c2) {
  const int r = in_rank(instance, cycles.at(c), v);
  const int r2 = in_rank(instance, cycles.at(c2), v);
  if (r < r2) return CyclePref::kPrefers;
  if (r == r2) return CyclePref::kIndifferent;
  return CyclePref::kDispreferred;
}

const CyclePrefSets::Entry& CyclePrefSets::of(int c, VertexId v) const {
  const auto& verts = cycle_vertices_.at(c);
  int pos = -1;
  for (int k = 0; k < static_cast<int>(verts.size()); ++k) {
    if (verts[k] == v) pos = k;
  }
  if (pos < 0) {
    throw InvalidArgument("vertex " + std::to_string(v) + " is not on cycle " + std::to_string(c));
  }
  return entries_[c][pos];
}

CyclePrefSets build_pref_sets(const Instance& instance, const std::vector<Cycle>& cycles) {
  CyclePrefSets sets;
  const int n = instance.num_vertices();
  sets.entries_.resize(cycles.size());
  for (std::size_t c = 0; c < cycles.size(); ++c) {
    sets.cycle_vertices_.push_back(cycles[c].vertices);
    sets.entries_[c].resize(cycles[c].vertices.size());
  }
  // through[v] = (cycle, position of v, rank of v's in-arc), cycle order.
  struct Visit {
    int cycle;
    int pos;
    int rank;
  };
  std::vector<std::vector<Visit>> through(n);
  for (int c = 0; c < static_cast<int>(cycles.size()); ++c) {
    for (int pos = 0; pos < cycles[c].size(); ++pos) {
      const VertexId v = cycles[c].vertices[pos];
      through[v].push_back({c, pos, instance.rank(cycles[c].predecessor(pos), v)});
    }
  }
  for (VertexId v = 0; v < n; ++v) {
    for (const Visit& self : through[v]) {
      auto& entry = sets.entries_[self.cycle][self.pos];
      for (const Visit& other : through[v]) {
        if (other.cycle == self.cycle) continue;
        if (other.rank < self.rank) {
          entry.strictly_better.push_back(other.cycle);
          entry.weakly_better.push_back(other.cycle);
        } else if (other.rank == self.rank) {
          entry.equally_good.push_back(other.cycle);
          entry.weakly_better.push_back(other.cycle);
        }
      }
    }
  }
  return sets;
}

}  // namespace stablekep
