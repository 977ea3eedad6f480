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

#ifndef STABLEKEP_INSTANCE_HPP_
#define STABLEKEP_INSTANCE_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace stablekep {

// Dense vertex index in 0..n-1.
using VertexId = int;

enum class VertexKind { kPair, kNdd };
enum class PreferenceMode { kStrict, kWeak };

// Compatibility arc: the donor of `from` can give to the patient of `to`.
// Rank 1 is the most preferred donor of `to`. Dummy arcs point from pairs
// into NDDs and stand for a donation to the waiting list.
struct Arc {
  VertexId from = 0;
  VertexId to = 0;
  int rank = 1;
  std::optional<double> weight;
  bool dummy = false;

  friend bool operator==(const Arc&, const Arc&) = default;
};

// Immutable compatibility graph with preferences. The constructor validates
// every structural invariant and stores the canonical form: vertices by id,
// arcs by (from, to).
class Instance {
 public:
  Instance(std::vector<VertexKind> kinds, std::vector<Arc> arcs, int max_cycle,
           int max_chain, PreferenceMode mode);

  int num_vertices() const { return static_cast<int>(kinds_.size()); }
  int num_pairs() const { return num_pairs_; }
  int num_ndds() const { return num_vertices() - num_pairs_; }
  VertexKind kind(VertexId v) const { return kinds_.at(v); }
  bool is_ndd(VertexId v) const { return kind(v) == VertexKind::kNdd; }
  const std::vector<VertexKind>& kinds() const { return kinds_; }

  const std::vector<Arc>& arcs() const { return arcs_; }
  int num_arcs() const { return static_cast<int>(arcs_.size()); }
  int num_real_arcs() const;

  // Maximum number of vertices in a pair-only cycle.
  int max_cycle() const { return max_cycle_; }
  // Maximum number of vertices in an NDD-initiated cycle, NDD included.
  int max_chain() const { return max_chain_; }
  PreferenceMode mode() const { return mode_; }

  // Indices into arcs(), ordered by (rank, from).
  const std::vector<int>& in_arcs(VertexId v) const { return in_arcs_.at(v); }
  // Indices into arcs(), ordered by to.
  const std::vector<int>& out_arcs(VertexId v) const { return out_arcs_.at(v); }

  std::optional<int> find_arc(VertexId from, VertexId to) const;
  // Rank of arc (from, to); throws InvalidArgument when it does not exist.
  int rank(VertexId from, VertexId to) const;

  friend bool operator==(const Instance&, const Instance&) = default;

 private:
  std::vector<VertexKind> kinds_;
  std::vector<Arc> arcs_;
  int max_cycle_;
  int max_chain_;
  PreferenceMode mode_;
  int num_pairs_ = 0;
  std::vector<std::vector<int>> in_arcs_;
  std::vector<std::vector<int>> out_arcs_;
};

// δ(j) with ranks, sorted by (rank, id).
std::vector<std::pair<VertexId, int>> in_neighbors(const Instance& instance, VertexId j);

// Pool-generation distributions. Blood types are indexed O, A, B, AB.
struct GeneratorConfig {
  std::array<double, 4> blood_type_probs{0.44, 0.42, 0.10, 0.04};
  std::vector<double> pra_levels{0.05, 0.45, 0.90};
  std::vector<double> pra_probs{0.70, 0.20, 0.10};
};

// Number of NDDs that accompany `num_pairs` pairs: ceil(5% of num_pairs).
int ndd_count_for(int num_pairs);

// Random pool. Pure function of its arguments.
Instance generate(int num_pairs, std::uint64_t seed, PreferenceMode mode, int max_cycle,
                  int max_chain, const GeneratorConfig& config = {});

std::string to_json(const Instance& instance);
Instance instance_from_json(const std::string& text);
Instance load(const std::filesystem::path& path);
void save(const Instance& instance, const std::filesystem::path& path);

const char* to_string(PreferenceMode mode);
PreferenceMode parse_preference_mode(const std::string& text);

}  // namespace stablekep

#endif  // STABLEKEP_INSTANCE_HPP_
