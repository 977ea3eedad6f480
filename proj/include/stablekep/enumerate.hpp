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

#ifndef STABLEKEP_ENUMERATE_HPP_
#define STABLEKEP_ENUMERATE_HPP_

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "stablekep/instance.hpp"

namespace stablekep {

enum class CycleKind { kPairCycle, kNddCycle };

// A cycle of the exchange graph in canonical rotation: the smallest vertex
// id first for pair cycles, the NDD first for NDD cycles. An NDD cycle is a
// chain closed by the dummy arc from its last pair back to the NDD.
struct Cycle {
  std::vector<VertexId> vertices;
  CycleKind kind = CycleKind::kPairCycle;
  // Number of pair vertices, i.e. transplants.
  int weight = 0;

  int size() const { return static_cast<int>(vertices.size()); }
  VertexId successor(int pos) const { return vertices[(pos + 1) % vertices.size()]; }
  VertexId predecessor(int pos) const {
    return vertices[(pos + vertices.size() - 1) % vertices.size()];
  }
  // Position of v in vertices, or -1.
  int position(VertexId v) const;
  bool contains(VertexId v) const { return position(v) >= 0; }
  // (from, to) pairs in cycle order, the closing arc last.
  std::vector<std::pair<VertexId, VertexId>> arcs() const;

  friend bool operator==(const Cycle&, const Cycle&) = default;
};

// Rotates a closed vertex sequence into canonical form and classifies it.
// Throws ValidationError if the sequence is not a cycle of `instance`
// allowed by K and L.
Cycle make_cycle(const Instance& instance, std::vector<VertexId> vertices);

// Every pair cycle with at most K vertices and every NDD cycle with at most
// L vertices (NDD included), each once, sorted by canonical vertex list.
std::vector<Cycle> enumerate_cycles(const Instance& instance);

enum class PathKind { kPairPath, kNddPath };

// Simple path given by its vertex sequence; arcs join consecutive vertices.
struct Path {
  std::vector<VertexId> vertices;
  PathKind kind = PathKind::kPairPath;

  int num_arcs() const { return static_cast<int>(vertices.size()) - 1; }
};

struct PathSets {
  // Simple paths with exactly K arcs through pair vertices only.
  std::vector<Path> pair_paths;
  // Simple paths with exactly L arcs: an NDD followed by pair vertices.
  std::vector<Path> ndd_paths;
};

PathSets enumerate_paths(const Instance& instance);

// Arc sets that chain flow in the edge formulation must not cover
// completely: pair-only paths too long for any chain, pair-only cycles
// longer than K, and walks from one NDD into another NDD.
struct ChainGuard {
  std::vector<VertexId> vertices;
  // True when the last vertex closes back to the first.
  bool closed = false;
  // Maximum number of chain-flow arcs allowed on the sequence.
  int rhs = 0;

  std::vector<std::pair<VertexId, VertexId>> arcs() const;
};

std::vector<ChainGuard> enumerate_chain_guards(const Instance& instance);

// Indices of the cycles whose vertex set contains v.
std::vector<int> cycles_through(const std::vector<Cycle>& cycles, VertexId v, int num_vertices);

// For each vertex, the indices of the cycles containing it.
std::vector<std::vector<int>> cycles_by_vertex(const std::vector<Cycle>& cycles, int num_vertices);

// Debug dump, one cycle per line: "pair:0,3,5 weight=3".
void write_cycles(std::ostream& out, const std::vector<Cycle>& cycles);
std::string format_cycle(const Cycle& cycle);

}  // namespace stablekep

#endif  // STABLEKEP_ENUMERATE_HPP_
