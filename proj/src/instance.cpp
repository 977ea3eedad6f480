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

#include "stablekep/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "stablekep/errors.hpp"

namespace stablekep {
namespace {

using nlohmann::json;

std::string arc_label(const Arc& a) {
  return "arc (" + std::to_string(a.from) + "," + std::to_string(a.to) + ")";
}

// Uniform double strictly inside (0, 1), independent of the standard
// library's distribution implementations.
double uniform_open(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

template <typename Probs>
int draw_category(std::mt19937_64& rng, const Probs& probs) {
  double u = uniform_open(rng);
  for (std::size_t k = 0; k + 1 < std::size(probs); ++k) {
    if (u < probs[k]) return static_cast<int>(k);
    u -= probs[k];
  }
  return static_cast<int>(std::size(probs)) - 1;
}

enum BloodType { kO = 0, kA = 1, kB = 2, kAB = 3 };

bool abo_compatible(int donor, int patient) {
  if (donor == kO || patient == kAB) return true;
  return donor == patient;
}

// Weight bucket of the partition (0,0.1], (0.1,0.2], ..., (0.9,1).
int weight_bucket(double w) {
  return std::clamp(static_cast<int>(std::ceil(w * 10.0)), 1, 10);
}

void assign_ranks(std::vector<Arc>& arcs, int num_vertices, PreferenceMode mode) {
  std::vector<std::vector<int>> into(num_vertices);
  for (int k = 0; k < static_cast<int>(arcs.size()); ++k) into[arcs[k].to].push_back(k);
  for (auto& list : into) {
    if (mode == PreferenceMode::kStrict) {
      std::sort(list.begin(), list.end(), [&](int a, int b) {
        if (*arcs[a].weight != *arcs[b].weight) return *arcs[a].weight > *arcs[b].weight;
        return arcs[a].from < arcs[b].from;
      });
      for (int r = 0; r < static_cast<int>(list.size()); ++r) arcs[list[r]].rank = r + 1;
    } else {
      std::set<int, std::greater<>> buckets;
      for (int k : list) buckets.insert(weight_bucket(*arcs[k].weight));
      for (int k : list) {
        const int b = weight_bucket(*arcs[k].weight);
        arcs[k].rank = 1 + static_cast<int>(std::distance(buckets.begin(), buckets.find(b)));
      }
    }
  }
}

}  // namespace

Instance::Instance(std::vector<VertexKind> kinds, std::vector<Arc> arcs, int max_cycle,
                   int max_chain, PreferenceMode mode)
    : kinds_(std::move(kinds)),
      arcs_(std::move(arcs)),
      max_cycle_(max_cycle),
      max_chain_(max_chain),
      mode_(mode) {
  if (max_cycle_ < 2) throw ValidationError("K must be at least 2");
  if (max_chain_ < 1) throw ValidationError("L must be at least 1");
  const int n = num_vertices();
  num_pairs_ = static_cast<int>(std::count(kinds_.begin(), kinds_.end(), VertexKind::kPair));
  std::sort(arcs_.begin(), arcs_.end(), [](const Arc& a, const Arc& b) {
    return std::pair(a.from, a.to) < std::pair(b.from, b.to);
  });
  in_arcs_.assign(n, {});
  out_arcs_.assign(n, {});
  for (int k = 0; k < num_arcs(); ++k) {
    const Arc& a = arcs_[k];
    if (a.from < 0 || a.from >= n || a.to < 0 || a.to >= n) {
      throw ValidationError(arc_label(a) + ": unknown vertex");
    }
    if (a.from == a.to) throw ValidationError(arc_label(a) + ": self loop");
    if (k > 0 && arcs_[k - 1].from == a.from && arcs_[k - 1].to == a.to) {
      throw ValidationError(arc_label(a) + ": duplicate arc");
    }
    if (a.rank < 1) throw ValidationError(arc_label(a) + ": rank must be >= 1");
    if (a.weight && !(*a.weight > 0.0 && *a.weight < 1.0)) {
      throw ValidationError(arc_label(a) + ": weight must lie in (0,1)");
    }
    const bool into_ndd = is_ndd(a.to);
    if (a.dummy != into_ndd) {
      throw ValidationError(arc_label(a) + (into_ndd ? ": arc into an NDD must be dummy"
                                                     : ": dummy arc must end at an NDD"));
    }
    if (into_ndd && is_ndd(a.from)) {
      throw ValidationError(arc_label(a) + ": arc between two NDDs");
    }
    in_arcs_[a.to].push_back(k);
    out_arcs_[a.from].push_back(k);
  }
  for (VertexId v = 0; v < n; ++v) {
    auto& list = in_arcs_[v];
    for (int k : list) {
      if (arcs_[k].rank > static_cast<int>(list.size())) {
        throw ValidationError(arc_label(arcs_[k]) + ": rank exceeds in-degree");
      }
    }
    std::sort(list.begin(), list.end(), [&](int a, int b) {
      return std::pair(arcs_[a].rank, arcs_[a].from) < std::pair(arcs_[b].rank, arcs_[b].from);
    });
    if (mode_ == PreferenceMode::kStrict) {
      for (std::size_t q = 1; q < list.size(); ++q) {
        if (arcs_[list[q]].rank == arcs_[list[q - 1]].rank) {
          throw ValidationError(arc_label(arcs_[list[q]]) +
                                ": strict preferences need distinct ranks");
        }
      }
    }
    if (is_ndd(v)) {
      // Every pair must have its dummy arc into v.
      if (static_cast<int>(list.size()) != num_pairs_) {
        throw ValidationError("NDD " + std::to_string(v) +
                              ": needs a dummy arc from every pair");
      }
    }
  }
}

int Instance::num_real_arcs() const {
  return static_cast<int>(
      std::count_if(arcs_.begin(), arcs_.end(), [](const Arc& a) { return !a.dummy; }));
}

std::optional<int> Instance::find_arc(VertexId from, VertexId to) const {
  if (from < 0 || from >= num_vertices()) return std::nullopt;
  const auto& out = out_arcs_[from];
  auto it = std::lower_bound(out.begin(), out.end(), to,
                             [&](int k, VertexId t) { return arcs_[k].to < t; });
  if (it != out.end() && arcs_[*it].to == to) return *it;
  return std::nullopt;
}

int Instance::rank(VertexId from, VertexId to) const {
  const auto k = find_arc(from, to);
  if (!k) {
    throw InvalidArgument("no arc (" + std::to_string(from) + "," + std::to_string(to) + ")");
  }
  return arcs_[*k].rank;
}

std::vector<std::pair<VertexId, int>> in_neighbors(const Instance& instance, VertexId j) {
  if (j < 0 || j >= instance.num_vertices()) {
    throw InvalidArgument("unknown vertex id " + std::to_string(j));
  }
  std::vector<std::pair<VertexId, int>> out;
  for (int k : instance.in_arcs(j)) {
    out.emplace_back(instance.arcs()[k].from, instance.arcs()[k].rank);
  }
  return out;
}

int ndd_count_for(int num_pairs) { return (num_pairs + 19) / 20; }

Instance generate(int num_pairs, std::uint64_t seed, PreferenceMode mode, int max_cycle,
                  int max_chain, const GeneratorConfig& config) {
  if (num_pairs < 1) throw InvalidArgument("num_pairs must be positive");
  if (max_cycle < 2) throw InvalidArgument("K must be at least 2");
  if (max_chain < 1) throw InvalidArgument("L must be at least 1");
  if (config.pra_levels.size() != config.pra_probs.size() || config.pra_levels.empty()) {
    throw InvalidArgument("PRA levels and probabilities must have equal, nonzero length");
  }
  std::mt19937_64 rng(seed);

  struct Person {
    int patient_bt = 0;
    int donor_bt = 0;
    double pra = 0.0;
  };
  std::vector<Person> pairs;
  while (static_cast<int>(pairs.size()) < num_pairs) {
    Person p;
    p.patient_bt = draw_category(rng, config.blood_type_probs);
    p.donor_bt = draw_category(rng, config.blood_type_probs);
    p.pra = config.pra_levels[draw_category(rng, config.pra_probs)];
    const bool positive_crossmatch = uniform_open(rng) < p.pra;
    if (!abo_compatible(p.donor_bt, p.patient_bt) || positive_crossmatch) pairs.push_back(p);
  }
  const int num_ndds = ndd_count_for(num_pairs);
  std::vector<int> ndd_bt(num_ndds);
  for (int& bt : ndd_bt) bt = draw_category(rng, config.blood_type_probs);

  const int n = num_pairs + num_ndds;
  auto donor_bt = [&](VertexId v) { return v < num_pairs ? pairs[v].donor_bt : ndd_bt[v - num_pairs]; };

  std::vector<Arc> arcs;
  for (VertexId i = 0; i < n; ++i) {
    for (VertexId j = 0; j < num_pairs; ++j) {
      if (i == j || !abo_compatible(donor_bt(i), pairs[j].patient_bt)) continue;
      if (uniform_open(rng) < pairs[j].pra) continue;
      arcs.push_back(Arc{i, j, 1, uniform_open(rng), false});
    }
  }
  for (VertexId d = num_pairs; d < n; ++d) {
    for (VertexId p = 0; p < num_pairs; ++p) {
      arcs.push_back(Arc{p, d, 1, uniform_open(rng), true});
    }
  }
  assign_ranks(arcs, n, mode);

  std::vector<VertexKind> kinds(n, VertexKind::kPair);
  std::fill(kinds.begin() + num_pairs, kinds.end(), VertexKind::kNdd);
  return Instance(std::move(kinds), std::move(arcs), max_cycle, max_chain, mode);
}

const char* to_string(PreferenceMode mode) {
  return mode == PreferenceMode::kStrict ? "strict" : "weak";
}

PreferenceMode parse_preference_mode(const std::string& text) {
  if (text == "strict") return PreferenceMode::kStrict;
  if (text == "weak") return PreferenceMode::kWeak;
  throw InvalidArgument("preference mode must be 'strict' or 'weak', got '" + text + "'");
}

std::string to_json(const Instance& instance) {
  json doc;
  doc["K"] = instance.max_cycle();
  doc["L"] = instance.max_chain();
  doc["mode"] = to_string(instance.mode());
  json vertices = json::array();
  for (VertexId v = 0; v < instance.num_vertices(); ++v) {
    vertices.push_back({{"id", v}, {"kind", instance.is_ndd(v) ? "ndd" : "pair"}});
  }
  doc["vertices"] = std::move(vertices);
  json arcs = json::array();
  for (const Arc& a : instance.arcs()) {
    json entry = {{"from", a.from}, {"to", a.to}, {"rank", a.rank}};
    if (a.weight) entry["weight"] = *a.weight;
    entry["dummy"] = a.dummy;
    arcs.push_back(std::move(entry));
  }
  doc["arcs"] = std::move(arcs);
  return doc.dump(1) + "\n";
}

namespace {

template <typename T>
T field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(where + ": missing field '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(where + "." + key + ": wrong type");
  }
}

}  // namespace

Instance instance_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t offset = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + offset, '\n');
    throw ParseError("instance file line " + std::to_string(line) + ": " + e.what());
  }
  const int max_cycle = field<int>(doc, "K", "instance");
  const int max_chain = field<int>(doc, "L", "instance");
  const PreferenceMode mode = parse_preference_mode(field<std::string>(doc, "mode", "instance"));
  if (!doc.contains("vertices") || !doc["vertices"].is_array()) {
    throw ParseError("instance: missing array 'vertices'");
  }
  if (!doc.contains("arcs") || !doc["arcs"].is_array()) {
    throw ParseError("instance: missing array 'arcs'");
  }
  const auto& vlist = doc["vertices"];
  std::vector<std::optional<VertexKind>> kinds(vlist.size());
  for (std::size_t k = 0; k < vlist.size(); ++k) {
    const std::string where = "vertices[" + std::to_string(k) + "]";
    const int id = field<int>(vlist[k], "id", where);
    const std::string kind = field<std::string>(vlist[k], "kind", where);
    if (id < 0 || id >= static_cast<int>(vlist.size())) {
      throw ValidationError(where + ": vertex ids must be dense in 0..n-1");
    }
    if (kinds[id]) throw ValidationError(where + ": duplicate vertex id " + std::to_string(id));
    if (kind == "pair") {
      kinds[id] = VertexKind::kPair;
    } else if (kind == "ndd") {
      kinds[id] = VertexKind::kNdd;
    } else {
      throw ParseError(where + ".kind: expected 'pair' or 'ndd'");
    }
  }
  std::vector<VertexKind> dense;
  for (const auto& k : kinds) dense.push_back(*k);
  std::vector<Arc> arcs;
  const auto& alist = doc["arcs"];
  for (std::size_t k = 0; k < alist.size(); ++k) {
    const std::string where = "arcs[" + std::to_string(k) + "]";
    Arc a;
    a.from = field<int>(alist[k], "from", where);
    a.to = field<int>(alist[k], "to", where);
    a.rank = field<int>(alist[k], "rank", where);
    if (alist[k].contains("weight") && !alist[k]["weight"].is_null()) {
      a.weight = field<double>(alist[k], "weight", where);
    }
    a.dummy = field<bool>(alist[k], "dummy", where);
    arcs.push_back(a);
  }
  return Instance(std::move(dense), std::move(arcs), max_cycle, max_chain, mode);
}

Instance load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return instance_from_json(buffer.str());
}

void save(const Instance& instance, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write instance file " + path.string());
  out << to_json(instance);
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace stablekep
