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

#ifndef STABLEKEP_PREFS_HPP_
#define STABLEKEP_PREFS_HPP_

#include <vector>

#include "stablekep/enumerate.hpp"
#include "stablekep/instance.hpp"

namespace stablekep {

// True iff j ranks donor i strictly above donor i2.
bool prefers(const Instance& instance, VertexId j, VertexId i, VertexId i2);
// True iff j ranks donors i and i2 equally.
bool indifferent(const Instance& instance, VertexId j, VertexId i, VertexId i2);

enum class CyclePref { kPrefers, kIndifferent, kDispreferred };

// How v rates cycle c against c2, judged by v's in-arc in each.
CyclePref cycle_pref(const Instance& instance, const std::vector<Cycle>& cycles, VertexId v,
                     int c, int c2);

// Rank of v's in-arc within cycle c. v must lie on c.
int in_rank(const Instance& instance, const Cycle& c, VertexId v);

// For every (vertex v, cycle c through v): the cycles other than c that v
// weakly prefers (B), strictly prefers (S) and rates equal (E) to c.
// Lists are sorted cycle indices.
class CyclePrefSets {
 public:
  struct Entry {
    std::vector<int> weakly_better;    // B
    std::vector<int> strictly_better;  // S
    std::vector<int> equally_good;     // E
  };

  // Entry for the vertex at position `pos` of cycle c.
  const Entry& at(int c, int pos) const { return entries_.at(c).at(pos); }
  // Entry for vertex v of cycle c; throws InvalidArgument if v is not on c.
  const Entry& of(int c, VertexId v) const;
  int num_cycles() const { return static_cast<int>(entries_.size()); }

 private:
  friend CyclePrefSets build_pref_sets(const Instance&, const std::vector<Cycle>&);
  std::vector<std::vector<VertexId>> cycle_vertices_;
  std::vector<std::vector<Entry>> entries_;
};

CyclePrefSets build_pref_sets(const Instance& instance, const std::vector<Cycle>& cycles);

}  // namespace stablekep

#endif  // STABLEKEP_PREFS_HPP_
