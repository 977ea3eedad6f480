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

#include "stablekep/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "stablekep/errors.hpp"
#include "stablekep/oracle.hpp"

namespace stablekep {
namespace {

double now_seconds() {
  using Clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(Clock::now().time_since_epoch()).count();
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::string svg_escape(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += ch;
    }
  }
  return out;
}

// Runs job(k) for k in [0, n) on up to `threads` workers.
template <typename Job>
void parallel_for(int n, int threads, Job job) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int k = 0; k < n; ++k) job(k);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int k = next++; k < n; k = next++) {
        try {
          job(k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

MilpSolution run_solver(const MilpModel& model, const PipelineOptions& options) {
  if (options.solver == SolverKind::kInternal) {
    return solve_exact(model, SolveOptions{options.time_limit_seconds});
  }
  std::string command = options.external_command;
  if (command.empty()) {
    const char* env = std::getenv("STABLEKEP_SOLVER_CMD");
    if (env != nullptr) command = env;
  }
  if (command.empty()) {
    throw InvalidArgument("external solver requested but no command given (STABLEKEP_SOLVER_CMD)");
  }
  const double t0 = now_seconds();
  MilpSolution sol = solve_external(model, command, options.workdir);
  sol.stats.seconds = now_seconds() - t0;
  return sol;
}

SolveReport solve_instance(const Instance& instance, const std::vector<Cycle>& cycles,
                           const PipelineOptions& options) {
  const double t0 = now_seconds();
  const BuildArtifacts art =
      build(instance, cycles, options.formulation, options.mode, options.objective);
  const MilpSolution sol = run_solver(art.model, options);
  SolveReport report;
  report.status = sol.status;
  report.nodes = sol.stats.nodes;
  report.num_cycles = static_cast<int>(cycles.size());
  report.num_variables = art.model.num_variables();
  report.num_constraints = art.model.num_constraints();
  if (sol.status == SolveStatus::kOptimal) {
    report.exchange = decode(instance, cycles, art, sol);
    const StabilityReport census = verify(instance, cycles, *report.exchange);
    report.transplants = census.transplants;
    report.blocking = static_cast<int>(census.blocking.size());
    report.weakly_blocking = static_cast<int>(census.weakly_blocking.size());
    report.certified = blocking_count(instance, cycles, *report.exchange, options.mode) == 0;
  }
  report.seconds = now_seconds() - t0;
  return report;
}

std::optional<int> max_transplants(const Instance& instance, const std::vector<Cycle>& cycles,
                                   const PipelineOptions& options) {
  PipelineOptions plain = options;
  plain.mode = StabilityMode::kUnconstrained;
  const SolveReport r = solve_instance(instance, cycles, plain);
  if (r.status == SolveStatus::kTimedOut) return std::nullopt;
  if (r.status != SolveStatus::kOptimal) throw Error("unconstrained model reported infeasible");
  return r.transplants;
}

RelaxedReport solve_relaxed(const Instance& instance, const std::vector<Cycle>& cycles,
                            const PipelineOptions& options, int m_star, const Rational& kappa) {
  const double t0 = now_seconds();
  const BuildArtifacts base =
      build(instance, cycles, options.formulation, options.mode, options.objective);
  const BuildArtifacts art = build_relaxed(instance, base, m_star, kappa);
  const MilpSolution sol = run_solver(art.model, options);
  RelaxedReport report;
  report.kappa = kappa;
  report.floor = transplant_floor(m_star, kappa);
  report.status = sol.status;
  if (sol.status == SolveStatus::kOptimal) {
    report.exchange = decode(instance, cycles, art, sol);
    report.transplants = transplants(cycles, *report.exchange);
    report.blocking = blocking_count(instance, cycles, *report.exchange, options.mode);
    for (int t : art.tau_var) {
      if (t >= 0) report.tau_sum += static_cast<int>(sol.values[t].num());
    }
  }
  report.seconds = now_seconds() - t0;
  return report;
}

std::string exchange_to_json(const std::vector<Cycle>& cycles, const Exchange& exchange) {
  nlohmann::json list = nlohmann::json::array();
  for (int c : exchange.cycle_indices) list.push_back(cycles.at(c).vertices);
  nlohmann::json doc;
  doc["cycles"] = list;
  return doc.dump(2) + "\n";
}

std::string to_json(const Instance& instance, const std::vector<Cycle>& cycles,
                    const SolveReport& report) {
  (void)instance;
  nlohmann::json doc;
  doc["status"] = to_string(report.status);
  doc["transplants"] = report.transplants;
  doc["blocking"] = report.blocking;
  doc["weakly_blocking"] = report.weakly_blocking;
  doc["certified"] = report.certified;
  doc["time_s"] = report.seconds;
  doc["nodes"] = report.nodes;
  doc["cycles"] = report.num_cycles;
  doc["variables"] = report.num_variables;
  doc["constraints"] = report.num_constraints;
  nlohmann::json ex = nlohmann::json::array();
  if (report.exchange) {
    for (int c : report.exchange->cycle_indices) ex.push_back(cycles.at(c).vertices);
  }
  doc["exchange"] = ex;
  return doc.dump(2) + "\n";
}

Exchange exchange_from_json(const Instance& instance, const std::vector<Cycle>& cycles,
                            const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("exchange file: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("cycles") || !doc["cycles"].is_array()) {
    throw ParseError("exchange file needs a \"cycles\" array");
  }
  std::map<std::vector<VertexId>, int> lookup;
  for (int c = 0; c < static_cast<int>(cycles.size()); ++c) lookup[cycles[c].vertices] = c;
  std::vector<int> indices;
  int k = 0;
  for (const auto& entry : doc["cycles"]) {
    if (!entry.is_array()) throw ParseError("cycles[" + std::to_string(k) + "] is not an array");
    std::vector<VertexId> verts;
    for (const auto& v : entry) {
      if (!v.is_number_integer()) {
        throw ParseError("cycles[" + std::to_string(k) + "] holds a non-integer");
      }
      verts.push_back(v.get<int>());
    }
    const Cycle cyc = make_cycle(instance, verts);
    auto it = lookup.find(cyc.vertices);
    if (it == lookup.end()) throw ValidationError("unknown cycle " + format_cycle(cyc));
    indices.push_back(it->second);
    ++k;
  }
  // Keep duplicates so the feasibility check can reject them.
  std::sort(indices.begin(), indices.end());
  return Exchange{indices};
}

// ---------------------------------------------------------------------------
// Experiments

SweepResult run_sweep(const Instance& instance, const PipelineOptions& options,
                      const std::vector<std::string>& kappas) {
  std::vector<Rational> parsed;
  for (const std::string& text : kappas) {
    const Rational k = Rational::parse(text);
    if (k < Rational(0) || k > Rational(1)) {
      throw InvalidArgument("kappa must lie in [0, 1], got " + text);
    }
    parsed.push_back(k);
  }
  const auto cycles = enumerate_cycles(instance);
  SweepResult result;
  const auto m_star = max_transplants(instance, cycles, options);
  if (!m_star) throw Error("maximum exchange timed out");
  result.m_star = *m_star;
  for (std::size_t k = 0; k < kappas.size(); ++k) {
    const RelaxedReport r = solve_relaxed(instance, cycles, options, *m_star, parsed[k]);
    SweepRow row;
    row.kappa_text = kappas[k];
    row.kappa = parsed[k];
    row.r = r.floor;
    row.status = r.status;
    row.transplants = r.transplants;
    row.blocking = r.blocking;
    row.seconds = r.seconds;
    result.rows.push_back(row);
  }
  return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "kappa,R,transplants,blocking,time_s\n";
  for (const SweepRow& row : result.rows) {
    out << row.kappa_text << "," << row.r << ",";
    if (row.status == SolveStatus::kOptimal) {
      out << row.transplants << "," << row.blocking;
    } else {
      out << ",";
    }
    out << "," << fixed(row.seconds, 3) << "\n";
  }
}

void write_sweep_svg(std::ostream& out, const SweepResult& result, const std::string& title) {
  const int width = 640;
  const int height = 400;
  const int left = 60;
  const int right = 20;
  const int top = 40;
  const int bottom = 50;
  double y_max = 1.0;
  double x_max = 0.0;
  for (const SweepRow& r : result.rows) {
    y_max = std::max({y_max, static_cast<double>(r.transplants), static_cast<double>(r.blocking)});
    x_max = std::max(x_max, r.kappa.to_double());
  }
  if (x_max <= 0.0) x_max = 1.0;
  auto px = [&](double x) { return left + (width - left - right) * x / x_max; };
  auto py = [&](double y) { return height - bottom - (height - top - bottom) * y / y_max; };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << svg_escape(title) << "</text>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right
      << "\" y2=\"" << height - bottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << height - bottom << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">kappa</text>\n";
  out << "<text x=\"16\" y=\"" << (top + height - bottom) / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
      << (top + height - bottom) / 2 << ")\">count</text>\n";
  for (const SweepRow& r : result.rows) {
    out << "<text x=\"" << fixed(px(r.kappa.to_double()), 1) << "\" y=\"" << height - bottom + 16
        << "\" text-anchor=\"middle\" font-size=\"10\">" << svg_escape(r.kappa_text)
        << "</text>\n";
  }
  out << "<text x=\"" << left - 6 << "\" y=\"" << fixed(py(y_max), 1)
      << "\" text-anchor=\"end\" font-size=\"10\">" << fixed(y_max, 0) << "</text>\n";
  out << "<text x=\"" << left - 6 << "\" y=\"" << fixed(py(0), 1)
      << "\" text-anchor=\"end\" font-size=\"10\">0</text>\n";
  const struct {
    const char* name;
    const char* color;
    bool blocking;
  } series[] = {{"transplants", "#1f77b4", false}, {"blocking cycles", "#d62728", true}};
  int legend_y = top + 4;
  for (const auto& s : series) {
    std::string points;
    for (const SweepRow& r : result.rows) {
      if (r.status != SolveStatus::kOptimal) continue;
      const double y = s.blocking ? r.blocking : r.transplants;
      points += fixed(px(r.kappa.to_double()), 1) + "," + fixed(py(y), 1) + " ";
    }
    if (!points.empty()) points.pop_back();
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\""
        << points << "\"/>\n";
    out << "<text x=\"" << width - right - 120 << "\" y=\"" << legend_y
        << "\" font-size=\"12\" fill=\"" << s.color << "\">" << s.name << "</text>\n";
    legend_y += 16;
  }
  out << "</svg>\n";
}

std::uint64_t bench_seed(std::uint64_t base, int size, int k) {
  std::uint64_t z = base * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(size) * 1000003ULL +
                    static_cast<std::uint64_t>(k);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<BenchRow> run_bench(const BenchConfig& config) {
  if (config.per_size < 1) throw InvalidArgument("per-size must be at least 1");
  struct Outcome {
    std::optional<int> m_star;
    std::vector<SolveReport> per_mode;
  };
  std::vector<BenchRow> rows;
  for (int size : config.sizes) {
    for (Formulation f : config.formulations) {
      std::vector<Outcome> outcomes(config.per_size);
      parallel_for(config.per_size, config.threads, [&](int k) {
        const Instance inst = generate(size, bench_seed(config.seed, size, k), config.prefs,
                                       config.max_cycle, config.max_chain);
        const auto cycles = enumerate_cycles(inst);
        PipelineOptions opt;
        opt.formulation = f;
        opt.time_limit_seconds = config.time_limit_seconds;
        Outcome& o = outcomes[k];
        o.m_star = max_transplants(inst, cycles, opt);
        for (const std::string& m : config.modes) {
          opt.mode = parse_stability_mode(m, config.prefs);
          o.per_mode.push_back(solve_instance(inst, cycles, opt));
        }
      });
      for (std::size_t mi = 0; mi < config.modes.size(); ++mi) {
        BenchRow row;
        row.size = size;
        row.formulation = f;
        row.mode = config.modes[mi];
        row.instances = config.per_size;
        double ps_sum = 0.0;
        int ps_count = 0;
        double time_sum = 0.0;
        for (const Outcome& o : outcomes) {
          const SolveReport& r = o.per_mode[mi];
          time_sum += r.seconds;
          if (r.status == SolveStatus::kInfeasible) ++row.no_solution;
          if (r.status == SolveStatus::kTimedOut) ++row.timeouts;
          if (r.status != SolveStatus::kOptimal || !o.m_star) continue;
          ps_sum += *o.m_star > 0 ? price_of_stability(*o.m_star, r.transplants) : 0.0;
          ++ps_count;
        }
        row.avg_ps = ps_count > 0 ? ps_sum / ps_count : 0.0;
        row.avg_time_s = time_sum / config.per_size;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "size,formulation,mode,instances,no_solution,avg_ps,avg_time_s\n";
  for (const BenchRow& r : rows) {
    out << r.size << "," << to_string(r.formulation) << "," << r.mode << "," << r.instances << ","
        << r.no_solution << "," << fixed(r.avg_ps, 2) << "," << fixed(r.avg_time_s, 3) << "\n";
  }
}

}  // namespace stablekep
