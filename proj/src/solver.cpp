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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <set>

#include "stablekep/errors.hpp"
#include "stablekep/milp.hpp"

namespace stablekep {
namespace {

// Linear expression over binaries (by binary index) plus a constant.
struct Expr {
  Rational constant;
  std::map<int, Rational> terms;

  void add(const Expr& other, const Rational& scale) {
    constant += other.constant * scale;
    for (const auto& [b, c] : other.terms) {
      Rational& slot = terms[b];
      slot += c * scale;
      if (slot.is_zero()) terms.erase(b);
    }
  }
};

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

struct IntRow {
  std::vector<std::pair<int, std::int64_t>> terms;
  std::int64_t lo = -kInf;
  std::int64_t hi = kInf;
};

struct Prepared {
  int num_bins = 0;
  std::vector<int> bin_of_var;
  std::vector<int> var_of_bin;
  std::vector<std::optional<Expr>> expr_of_var;
  std::vector<IntRow> rows;
  std::vector<std::int64_t> obj;  // maximize, scaled to integers
  bool trivially_infeasible = false;
};

Expr var_expr(const Prepared& p, int v) {
  if (p.bin_of_var[v] >= 0) {
    Expr e;
    e.terms[p.bin_of_var[v]] = 1;
    return e;
  }
  return *p.expr_of_var[v];
}

// Adds "lo <= expr <= hi" as an integer row (either side may be absent).
void add_row(Prepared& p, const Expr& expr, std::optional<Rational> lo, std::optional<Rational> hi) {
  std::int64_t scale = expr.constant.den();
  for (const auto& [b, c] : expr.terms) scale = lcm_checked(scale, c.den());
  if (lo) scale = lcm_checked(scale, lo->den());
  if (hi) scale = lcm_checked(scale, hi->den());
  const Rational s(scale);
  IntRow row;
  std::int64_t abs_sum = 0;
  for (const auto& [b, c] : expr.terms) {
    const Rational a = c * s;
    row.terms.push_back({b, a.num()});
    abs_sum = checked_add(abs_sum, a.num() < 0 ? -a.num() : a.num());
  }
  if (abs_sum >= kInf / 2) throw ArithmeticOverflow("row coefficients too large");
  const Rational shift = expr.constant * s;
  if (lo) row.lo = (*lo * s - shift).num();
  if (hi) row.hi = (*hi * s - shift).num();
  if (row.terms.empty()) {
    if (row.lo > 0 || row.hi < 0) p.trivially_infeasible = true;
    return;
  }
  // Drop rows no assignment can violate.
  std::int64_t min_act = 0;
  std::int64_t max_act = 0;
  for (const auto& [b, a] : row.terms) (a > 0 ? max_act : min_act) += a;
  if (min_act >= row.lo && max_act <= row.hi) return;
  p.rows.push_back(std::move(row));
}

Prepared prepare(const MilpModel& model) {
  Prepared p;
  const auto& vars = model.variables();
  const auto& rows = model.constraints();
  const int n = model.num_variables();
  p.bin_of_var.assign(n, -1);
  p.expr_of_var.resize(n);
  for (int v = 0; v < n; ++v) {
    if (vars[v].kind == VarKind::kBinary) {
      p.bin_of_var[v] = p.num_bins++;
      p.var_of_bin.push_back(v);
    }
  }

  // Resolve continuous variables through defining equalities.
  std::vector<char> used_row(rows.size(), 0);
  bool progress = true;
  int unresolved = n - p.num_bins;
  while (progress && unresolved > 0) {
    progress = false;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (used_row[r] || rows[r].sense != RowSense::kEqual) continue;
      int target = -1;
      bool ok = true;
      for (const Term& t : rows[r].terms) {
        if (t.coeff.is_zero()) continue;
        const bool known = p.bin_of_var[t.var] >= 0 || p.expr_of_var[t.var].has_value();
        if (known) continue;
        if (target >= 0 && target != t.var) {
          ok = false;
          break;
        }
        target = t.var;
      }
      if (!ok || target < 0) continue;
      Rational own;
      for (const Term& t : rows[r].terms) {
        if (t.var == target) own += t.coeff;
      }
      if (own.is_zero()) continue;
      // own * target = rhs - sum(others)
      Expr e;
      e.constant = rows[r].rhs / own;
      for (const Term& t : rows[r].terms) {
        if (t.var == target || t.coeff.is_zero()) continue;
        e.add(var_expr(p, t.var), -t.coeff / own);
      }
      p.expr_of_var[target] = std::move(e);
      used_row[r] = 1;
      --unresolved;
      progress = true;
    }
  }
  if (unresolved > 0) {
    for (int v = 0; v < n; ++v) {
      if (p.bin_of_var[v] < 0 && !p.expr_of_var[v]) {
        throw UnsupportedStructure("continuous variable " + vars[v].name +
                                   " is not defined by an equality over binaries");
      }
    }
  }

  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (used_row[r]) continue;
    Expr e;
    for (const Term& t : rows[r].terms) e.add(var_expr(p, t.var), t.coeff);
    const Rational& rhs = rows[r].rhs;
    switch (rows[r].sense) {
      case RowSense::kLessEqual:
        add_row(p, e, std::nullopt, rhs);
        break;
      case RowSense::kGreaterEqual:
        add_row(p, e, rhs, std::nullopt);
        break;
      case RowSense::kEqual:
        add_row(p, e, rhs, rhs);
        break;
    }
  }
  for (int v = 0; v < n; ++v) {
    if (!p.expr_of_var[v]) continue;
    std::optional<Rational> hi = vars[v].upper;
    add_row(p, *p.expr_of_var[v], Rational(0), hi);
  }

  Expr obj;
  for (int v = 0; v < n; ++v) {
    if (!vars[v].objective.is_zero()) obj.add(var_expr(p, v), vars[v].objective);
  }
  std::int64_t scale = 1;
  for (const auto& [b, c] : obj.terms) scale = lcm_checked(scale, c.den());
  p.obj.assign(p.num_bins, 0);
  const bool minimize = model.sense() == ObjectiveSense::kMinimize;
  for (const auto& [b, c] : obj.terms) {
    const std::int64_t a = (c * Rational(scale)).num();
    p.obj[b] = minimize ? -a : a;
  }
  return p;
}

// Bounded dual simplex on a dense tableau over the LP relaxation
// lo <= A x <= hi, 0 <= x <= 1. Column j < n is binary j; column n + r is
// the activity of LP row r. Rows of A enter lazily: after each optimum the
// most violated missing rows are appended with their activity basic. Only
// bounds change between calls, so the basis stays dual feasible and each
// node warm-starts from the previous one.
class DualSimplex {
 public:
  static constexpr double kBig = 1e30;

  explicit DualSimplex(const Prepared& p)
      : p_(p), num_model_rows_(static_cast<int>(p.rows.size())), n_(p.num_bins), cols_(n_),
        cap_(n_) {
    lb_.assign(n_, 0.0);
    ub_.assign(n_, 1.0);
    cost_.assign(n_, 0.0);
    d_.assign(n_, 0.0);
    z_.assign(n_, 0.0);
    pos_.assign(n_, -1);
    in_lp_.assign(p.rows.size(), 0);
    // Deterministic cost perturbation against dual degeneracy. The bound
    // itself is recomputed from unperturbed data, so this only steers.
    std::uint64_t h = 0x9E3779B97F4A7C15ULL;
    for (int j = 0; j < n_; ++j) {
      h ^= h << 13;
      h ^= h >> 7;
      h ^= h << 17;
      const double eps = 1e-7 * (1.0 + static_cast<double>(h % 1000) / 100.0);
      const double c = static_cast<double>(p.obj[j]);
      cost_[j] = c > 0 ? c + eps * (1.0 + c) : c - eps * (1.0 + std::fabs(c));
      d_[j] = cost_[j];
      z_[j] = c > 0 ? 1.0 : 0.0;
    }
  }

  int num_rows() const { return m_; }
  // Source of LP row r: a model row, or a cut past the model rows.
  const IntRow& row(int r) const {
    const int k = source_[r];
    return k < num_model_rows_ ? p_.rows[k] : cuts_[k - num_model_rows_];
  }

  // Adds a globally valid row, active at once; false when over the size cap.
  bool add_cut(IntRow cut) {
    if (static_cast<double>(m_ + 1) * static_cast<double>(cols_ + 1) > kMaxCells) return false;
    cuts_.push_back(std::move(cut));
    add_row(cuts_.back(), num_model_rows_ + static_cast<int>(cuts_.size()) - 1);
    return true;
  }

  void set_bounds(int j, double lo, double hi) {
    lb_[j] = lo;
    ub_[j] = hi;
    if (pos_[j] >= 0) return;
    double target = z_[j];
    if (lo == hi) {
      target = lo;
    } else if (d_[j] > kDualTol) {
      target = hi;
    } else if (d_[j] < -kDualTol) {
      target = lo;
    } else {
      target = std::clamp(target, lo, hi);
    }
    move_nonbasic(j, target);
  }

  double value(int j) const { return pos_[j] >= 0 ? xb_[pos_[j]] : z_[j]; }
  // Row multipliers of the current basis.
  double dual(int r) const { return d_[n_ + r]; }
  // Weight of LP row r in the tableau row that proved infeasibility.
  double ray(int r) const { return t_[ray_row_][n_ + r]; }

  enum class Result { kOptimal, kInfeasible, kCutoff, kIterationLimit };

  // Optimum over all rows reachable within the size cap. Stops early once
  // the (upper-bounding) objective drops below cutoff.
  Result solve(int max_iterations, double cutoff) {
    while (true) {
      const Result r = reoptimize(max_iterations, cutoff);
      if (r != Result::kOptimal || !separate()) return r;
    }
  }

  double objective() const {
    double total = 0.0;
    for (int j = 0; j < n_; ++j) {
      if (cost_[j] != 0.0) total += cost_[j] * value(j);
    }
    return total;
  }

 private:
  static constexpr double kPrimalTol = 1e-7;
  static constexpr double kDualTol = 1e-9;
  static constexpr double kPivotTol = 1e-9;
  static constexpr double kMaxCells = 3e7;
  static constexpr int kRowsPerRound = 64;

  Result reoptimize(int max_iterations, double cutoff) {
    for (int it = 0; it < max_iterations; ++it) {
      int leave = -1;
      double worst = kPrimalTol;
      for (int r = 0; r < m_; ++r) {
        const int v = basis_[r];
        const double over = std::max(lb_[v] - xb_[r], xb_[r] - ub_[v]);
        if (over > worst) {
          worst = over;
          leave = r;
        }
      }
      if (leave < 0) return Result::kOptimal;
      if (objective() < cutoff) return Result::kCutoff;
      const int p = basis_[leave];
      const bool raise = xb_[leave] < lb_[p];
      const double* tr = t_[leave].data();
      candidates_.clear();
      for (int j = 0; j < cols_; ++j) {
        if (pos_[j] >= 0 || lb_[j] == ub_[j]) continue;
        const double alpha = tr[j];
        if (std::fabs(alpha) < kPivotTol) continue;
        const bool at_upper = z_[j] >= ub_[j];
        // raise: need -alpha * step > 0.
        const bool ok = raise ? (at_upper ? alpha > 0 : alpha < 0)
                              : (at_upper ? alpha < 0 : alpha > 0);
        if (!ok) continue;
        candidates_.push_back({std::fabs(d_[j]) / std::fabs(alpha), std::fabs(alpha), j});
      }
      std::sort(candidates_.begin(), candidates_.end(), [](const Candidate& a, const Candidate& b) {
        if (a.ratio != b.ratio) return a.ratio < b.ratio;
        if (a.alpha != b.alpha) return a.alpha > b.alpha;
        return a.col < b.col;
      });
      // Bound-flipping ratio test: pass breakpoints of boxed columns while
      // the leaving row stays infeasible.
      double slope = raise ? lb_[p] - xb_[leave] : xb_[leave] - ub_[p];
      int enter = -1;
      flips_.clear();
      for (const Candidate& c : candidates_) {
        const double range = ub_[c.col] - lb_[c.col];
        const bool boxed = range < kBig / 2;
        if (boxed && slope - c.alpha * range > kPrimalTol) {
          slope -= c.alpha * range;
          flips_.push_back(c.col);
          continue;
        }
        enter = c.col;
        break;
      }
      if (enter < 0) {
        ray_row_ = leave;
        return Result::kInfeasible;
      }
      for (int j : flips_) move_nonbasic(j, z_[j] >= ub_[j] ? lb_[j] : ub_[j]);
      pivot(leave, enter, raise ? lb_[p] : ub_[p]);
    }
    return Result::kIterationLimit;
  }

  // Appends the most violated missing rows; false when none is added.
  bool separate() {
    violated_.clear();
    for (int k = 0; k < num_model_rows_; ++k) {
      if (in_lp_[k]) continue;
      const IntRow& row = p_.rows[k];
      double act = 0.0;
      for (const auto& [b, a] : row.terms) act += static_cast<double>(a) * value(b);
      const double over = std::max(static_cast<double>(row.lo) - act,
                                   act - static_cast<double>(row.hi));
      if (over > 1e-6) violated_.push_back({over, k});
    }
    if (violated_.empty()) return false;
    std::sort(violated_.begin(), violated_.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    int added = 0;
    for (const auto& [over, k] : violated_) {
      if (added == kRowsPerRound) break;
      const double cells = static_cast<double>(m_ + 1) * static_cast<double>(cols_ + 1);
      if (cells > kMaxCells) break;
      in_lp_[k] = 1;
      add_row(p_.rows[k], k);
      ++added;
    }
    return added > 0;
  }

  void add_row(const IntRow& row, int k) {
    if (cols_ == cap_) {
      cap_ = std::max(2 * cap_, n_ + 16);
      for (auto& tr : t_) tr.resize(cap_, 0.0);
    }
    const int s = cols_++;
    const int r = m_++;
    source_.push_back(k);
    lb_.push_back(row.lo <= -kInf ? -kBig : static_cast<double>(row.lo));
    ub_.push_back(row.hi >= kInf ? kBig : static_cast<double>(row.hi));
    cost_.push_back(0.0);
    d_.push_back(0.0);
    z_.push_back(0.0);
    pos_.push_back(r);
    basis_.push_back(s);
    // s - sum a_b x_b = 0, with basic columns eliminated.
    std::vector<double> tr(cap_, 0.0);
    tr[s] = 1.0;
    double act = 0.0;
    for (const auto& [b, a] : row.terms) {
      const double ad = static_cast<double>(a);
      act += ad * value(b);
      if (pos_[b] < 0) {
        tr[b] -= ad;
        continue;
      }
      const std::vector<double>& src = t_[pos_[b]];
      for (int c = 0; c < s; ++c) {
        if (src[c] != 0.0) tr[c] += ad * src[c];
      }
      tr[b] = 0.0;
    }
    for (int c = 0; c < s; ++c) {
      if (std::fabs(tr[c]) < 1e-12) tr[c] = 0.0;
    }
    t_.push_back(std::move(tr));
    xb_.push_back(act);
  }

  void move_nonbasic(int j, double target) {
    const double delta = target - z_[j];
    if (delta == 0.0) return;
    z_[j] = target;
    for (int r = 0; r < m_; ++r) {
      const double a = t_[r][j];
      if (a != 0.0) xb_[r] -= a * delta;
    }
  }

  void pivot(int r, int q, double bound) {
    double* tr = t_[r].data();
    const double alpha = tr[q];
    const int p = basis_[r];
    const double step = (xb_[r] - bound) / alpha;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double a = t_[i][q];
      if (a != 0.0) xb_[i] -= a * step;
    }
    const double entering_value = z_[q] + step;
    z_[p] = bound;
    // Normalise the pivot row and collect its support.
    nz_.clear();
    const double inv = 1.0 / alpha;
    for (int k = 0; k < cols_; ++k) {
      if (tr[k] == 0.0) continue;
      tr[k] *= inv;
      if (std::fabs(tr[k]) < 1e-12) {
        tr[k] = 0.0;
      } else {
        nz_.push_back(k);
      }
    }
    tr[q] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* ti = t_[i].data();
      const double f = ti[q];
      if (f == 0.0) continue;
      for (int k : nz_) {
        double v = ti[k] - f * tr[k];
        if (std::fabs(v) < 1e-12) v = 0.0;
        ti[k] = v;
      }
      ti[q] = 0.0;
    }
    const double fd = d_[q];
    if (fd != 0.0) {
      for (int k : nz_) d_[k] -= fd * tr[k];
      d_[q] = 0.0;
    }
    basis_[r] = q;
    pos_[q] = r;
    pos_[p] = -1;
    xb_[r] = entering_value;
  }

  const Prepared& p_;
  int num_model_rows_;
  std::vector<IntRow> cuts_;
  int n_;
  int m_ = 0;
  int cols_;
  int cap_;
  int ray_row_ = 0;
  std::vector<std::vector<double>> t_;
  std::vector<double> lb_;
  std::vector<double> ub_;
  std::vector<double> cost_;
  std::vector<double> d_;
  std::vector<double> z_;
  std::vector<int> pos_;
  std::vector<int> basis_;
  std::vector<double> xb_;
  std::vector<char> in_lp_;
  std::vector<int> source_;
  std::vector<int> nz_;
  std::vector<std::pair<double, int>> violated_;
  struct Candidate {
    double ratio;
    double alpha;
    int col;
  };
  std::vector<Candidate> candidates_;
  std::vector<int> flips_;
};

class Search {
 public:
  Search(const Prepared& p, double budget, bool use_lp)
      : p_(p),
        n_(p.num_bins),
        value_(n_, -1),
        min_act_(p.rows.size(), 0),
        max_act_(p.rows.size(), 0),
        max_abs_(p.rows.size(), 0),
        queued_(p.rows.size(), 0),
        occ_(n_),
        pack_occ_(n_),
        pi_(p.rows.size(), 0.0),
        budget_(budget) {
    for (std::size_t r = 0; r < p.rows.size(); ++r) {
      const IntRow& row = p.rows[r];
      bool all_pos = true;
      for (const auto& [b, a] : row.terms) {
        occ_[b].push_back({static_cast<int>(r), a});
        (a > 0 ? max_act_[r] : min_act_[r]) += a;
        max_abs_[r] = std::max(max_abs_[r], a < 0 ? -a : a);
        all_pos &= a > 0;
      }
      // Packing rows: nonnegative coefficients and no binding lower side.
      if (all_pos && row.lo <= 0 && row.hi < max_act_[r]) {
        for (const auto& [b, a] : row.terms) pack_occ_[b].push_back({static_cast<int>(r), a});
      }
    }
    std::int64_t g = 0;
    for (std::int64_t c : p.obj) g = std::gcd(g, c < 0 ? -c : c);
    step_ = g;
    if (use_lp && n_ > 0 && !p.rows.empty()) {
      build_conflicts();
      lp_ = std::make_unique<DualSimplex>(p);
      lp_value_.assign(n_, 0.0);
      reduced_.assign(n_, 0.0);
    }
  }

  void run() {
    start_ = std::chrono::steady_clock::now();
    for (std::size_t r = 0; r < p_.rows.size(); ++r) enqueue(static_cast<int>(r));
    bool alive = propagate();
    if (alive && lp_) alive = probe();
    while (true) {
      if ((++nodes_ & 63) == 0 && elapsed() > budget_) {
        timed_out_ = true;
        return;
      }
      bool dead = !alive;
      if (!dead && has_incumbent_ && !can_improve()) dead = true;
      int branch = -1;
      if (!dead) {
        int first_free = 0;
        while (first_free < n_ && value_[first_free] >= 0) ++first_free;
        if (first_free == n_) {
          record();
          dead = true;
        } else {
          branch = first_free;
          if (lp_) dead = !lp_node(branch);
        }
      }
      if (!dead) {
        stack_.push_back({branch, trail_.size(), false});
        fix(branch, 1);
        alive = propagate();
        continue;
      }
      // Backtrack.
      bool resumed = false;
      while (!stack_.empty()) {
        Decision& d = stack_.back();
        undo(d.mark);
        if (!d.second) {
          d.second = true;
          fix(d.bin, 0);
          alive = propagate();
          resumed = true;
          break;
        }
        stack_.pop_back();
      }
      if (!resumed) return;
    }
  }

  bool timed_out() const { return timed_out_; }
  bool has_incumbent() const { return has_incumbent_; }
  const std::vector<signed char>& incumbent() const { return best_; }
  std::int64_t nodes() const { return nodes_; }
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  struct Decision {
    int bin;
    std::size_t mark;
    bool second;
  };

  void enqueue(int r) {
    if (!queued_[r]) {
      queued_[r] = 1;
      queue_.push_back(r);
    }
  }

  void fix(int b, int v) {
    value_[b] = static_cast<signed char>(v);
    trail_.push_back(b);
    for (const auto& [r, a] : occ_[b]) {
      if (a > 0) {
        (v ? min_act_[r] : max_act_[r]) += v ? a : -a;
      } else {
        (v ? max_act_[r] : min_act_[r]) += v ? a : -a;
      }
      enqueue(r);
    }
    if (v) fixed_obj_ += p_.obj[b];
    if (lp_) lp_->set_bounds(b, v, v);
  }

  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      const int b = trail_.back();
      trail_.pop_back();
      const int v = value_[b];
      for (const auto& [r, a] : occ_[b]) {
        if (a > 0) {
          (v ? min_act_[r] : max_act_[r]) -= v ? a : -a;
        } else {
          (v ? max_act_[r] : min_act_[r]) -= v ? a : -a;
        }
      }
      if (v) fixed_obj_ -= p_.obj[b];
      value_[b] = -1;
      if (lp_) lp_->set_bounds(b, 0.0, 1.0);
    }
  }

  bool propagate() {
    std::size_t head = 0;
    bool ok = true;
    while (head < queue_.size()) {
      const int r = queue_[head++];
      queued_[r] = 0;
      if (!ok) continue;
      const IntRow& row = p_.rows[r];
      if (min_act_[r] > row.hi || max_act_[r] < row.lo) {
        ok = false;
        continue;
      }
      const std::int64_t slack_hi = row.hi - min_act_[r];
      const std::int64_t slack_lo = max_act_[r] - row.lo;
      if (slack_hi >= max_abs_[r] && slack_lo >= max_abs_[r]) continue;
      for (const auto& [b, a] : row.terms) {
        if (value_[b] >= 0) continue;
        const std::int64_t m = a < 0 ? -a : a;
        // a > 0: x=1 raises min, x=0 lowers max; a < 0 the reverse.
        const bool one_bad = a > 0 ? m > slack_hi : m > slack_lo;
        const bool zero_bad = a > 0 ? m > slack_lo : m > slack_hi;
        if (one_bad && zero_bad) {
          ok = false;
          break;
        }
        if (one_bad) {
          fix(b, 0);
        } else if (zero_bad) {
          fix(b, 1);
        }
      }
    }
    queue_.clear();
    return ok;
  }

  // Cheap bound: free positive objective terms, capped by packing rows.
  bool can_improve() {
    std::int64_t simple = fixed_obj_;
    double loose = 0.0;
    touched_.clear();
    for (int b = 0; b < n_; ++b) {
      if (value_[b] >= 0 || p_.obj[b] <= 0) continue;
      simple += p_.obj[b];
      const auto& rows = pack_occ_[b];
      if (rows.empty()) {
        loose += static_cast<double>(p_.obj[b]);
        continue;
      }
      const double share = static_cast<double>(p_.obj[b]) / static_cast<double>(rows.size());
      for (const auto& [r, a] : rows) {
        const double want = share / static_cast<double>(a);
        if (pi_[r] == 0.0) touched_.push_back(r);
        pi_[r] = std::max(pi_[r], want);
      }
    }
    for (int r : touched_) {
      const std::int64_t slack = p_.rows[r].hi - min_act_[r];
      loose += pi_[r] * static_cast<double>(std::max<std::int64_t>(slack, 0));
      pi_[r] = 0.0;
    }
    const double bound =
        std::min(static_cast<double>(simple), static_cast<double>(fixed_obj_) + loose);
    return beats_incumbent(bound);
  }

  bool beats_incumbent(double bound) const {
    if (!has_incumbent_) return true;
    // Objective values are multiples of step_ (when nonzero).
    if (step_ == 0) return false;
    return bound >= static_cast<double>(best_obj_ + step_) - 1e-6;
  }

  // Lagrangian bound for the current node from the LP row multipliers.
  // Valid for any multipliers, so simplex round-off cannot cut off optima.
  double lagrangian_bound() {
    double total = 0.0;
    for (int b = 0; b < n_; ++b) reduced_[b] = static_cast<double>(p_.obj[b]);
    for (int r = 0; r < lp_->num_rows(); ++r) {
      double y = lp_->dual(r);
      const IntRow& row = lp_->row(r);
      if (y > 0 && row.hi >= kInf) y = 0;
      if (y < 0 && row.lo <= -kInf) y = 0;
      if (y == 0) continue;
      total += y * static_cast<double>(y > 0 ? row.hi : row.lo);
      for (const auto& [b, a] : row.terms) reduced_[b] -= y * static_cast<double>(a);
    }
    for (int b = 0; b < n_; ++b) {
      if (value_[b] >= 0) {
        total += reduced_[b] * value_[b];
      } else {
        total += std::max(0.0, reduced_[b]);
      }
    }
    return total;
  }

  // Fixes each free binary to 1 and propagates: forced ones become
  // implications x_b <= x_c, forced zeros conflicts, failures root fixings.
  bool probe() {
    std::vector<int> zero;
    for (int b = 0; b < n_ && elapsed() < budget_; ++b) {
      if (value_[b] >= 0) continue;
      const std::size_t mark = trail_.size();
      fix(b, 1);
      const bool ok = propagate();
      if (ok) {
        for (std::size_t t = mark + 1; t < trail_.size(); ++t) {
          const int c = trail_[t];
          if (value_[c] == 1) {
            if (implications_.size() < kMaxImplications) implications_.push_back({b, c});
          } else {
            adj_[b].push_back(c);
            adj_[c].push_back(b);
          }
        }
      }
      undo(mark);
      if (!ok) zero.push_back(b);
    }
    for (auto& list : adj_) {
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    implication_used_.assign(implications_.size(), 0);
    for (int b : zero) {
      if (value_[b] == 1) return false;
      if (value_[b] < 0) fix(b, 0);
    }
    return propagate();
  }

  bool add_implication_cuts() {
    int added = 0;
    for (std::size_t k = 0; k < implications_.size(); ++k) {
      if (implication_used_[k]) continue;
      const auto [b, c] = implications_[k];
      const double xb = value_[b] >= 0 ? value_[b] : lp_value_[b];
      const double xc = value_[c] >= 0 ? value_[c] : lp_value_[c];
      if (xb - xc <= 1e-6) continue;
      IntRow cut;
      cut.terms = {{b, 1}, {c, -1}};
      cut.hi = 0;
      if (!lp_->add_cut(std::move(cut))) break;
      implication_used_[k] = 1;
      if (++added == kCutsPerRound) break;
    }
    return added > 0;
  }

  // x_a = x_b = 1 is impossible when some row cannot absorb both.
  void build_conflicts() {
    adj_.assign(n_, {});
    std::size_t pairs = 0;
    for (const IntRow& row : p_.rows) {
      for (int side = 0; side < 2; ++side) {
        // side 0: sum a x <= hi; side 1: sum -a x <= -lo.
        const std::int64_t limit = side == 0 ? row.hi : (row.lo <= -kInf ? kInf : -row.lo);
        if (limit >= kInf) continue;
        std::int64_t floor_act = 0;
        std::vector<std::pair<int, std::int64_t>> pos;
        for (const auto& [b, a0] : row.terms) {
          const std::int64_t a = side == 0 ? a0 : -a0;
          if (a < 0) floor_act += a;
          if (a > 0) pos.push_back({b, a});
        }
        if (pos.size() > kMaxConflictRow) continue;
        for (std::size_t i = 0; i < pos.size(); ++i) {
          for (std::size_t j = i + 1; j < pos.size(); ++j) {
            if (floor_act + pos[i].second + pos[j].second <= limit) continue;
            adj_[pos[i].first].push_back(pos[j].first);
            adj_[pos[j].first].push_back(pos[i].first);
            ++pairs;
          }
        }
        if (pairs > kMaxConflictPairs) break;
      }
    }
    for (auto& list : adj_) {
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
    }
  }

  bool conflicts(int a, int b) const {
    return std::binary_search(adj_[a].begin(), adj_[a].end(), b);
  }

  // Greedy cliques of the conflict graph that the LP point violates.
  bool add_clique_cuts() {
    if (cut_keys_.size() >= kMaxCuts) return false;
    cand_.clear();
    for (int b = 0; b < n_; ++b) {
      if (value_[b] < 0 && !adj_[b].empty() && lp_value_[b] > 1e-6) cand_.push_back(b);
    }
    std::sort(cand_.begin(), cand_.end(), [&](int a, int b) {
      return lp_value_[a] != lp_value_[b] ? lp_value_[a] > lp_value_[b] : a < b;
    });
    int added = 0;
    std::vector<int> clique;
    for (std::size_t seed = 0; seed < cand_.size() && added < kCutsPerRound; ++seed) {
      clique.assign(1, cand_[seed]);
      double sum = lp_value_[cand_[seed]];
      for (int v : cand_) {
        if (v == cand_[seed]) continue;
        bool all = true;
        for (int c : clique) all = all && conflicts(v, c);
        if (!all) continue;
        clique.push_back(v);
        sum += lp_value_[v];
      }
      if (clique.size() < 3 || sum <= 1.0 + 1e-6) continue;
      // Lift with the rest of the seed's neighbours.
      for (int v : adj_[cand_[seed]]) {
        if (std::find(clique.begin(), clique.end(), v) != clique.end()) continue;
        bool all = true;
        for (int c : clique) all = all && conflicts(v, c);
        if (all) clique.push_back(v);
      }
      std::sort(clique.begin(), clique.end());
      if (!cut_keys_.insert(clique).second) continue;
      IntRow cut;
      for (int v : clique) cut.terms.push_back({v, 1});
      cut.hi = 1;
      if (!lp_->add_cut(std::move(cut))) return added > 0;
      ++added;
    }
    return added > 0;
  }

  // Checks the simplex infeasibility claim in exact terms: with weights w
  // on the row activities s = A x, sum w s = sum (w A) x must be possible
  // for some s within row bounds and x within the node's bounds.
  bool infeasibility_proven() {
    double s_lo = 0.0, s_hi = 0.0, x_lo = 0.0, x_hi = 0.0, scale = 0.0;
    bool lo_finite = true, hi_finite = true;
    for (int b = 0; b < n_; ++b) reduced_[b] = 0.0;
    for (int r = 0; r < lp_->num_rows(); ++r) {
      const double w = lp_->ray(r);
      if (w == 0.0) continue;
      const IntRow& row = lp_->row(r);
      // Ends of w * s over lo <= s <= hi.
      const bool low_from_lo = w > 0;
      const std::int64_t low_end = low_from_lo ? row.lo : row.hi;
      const std::int64_t high_end = low_from_lo ? row.hi : row.lo;
      if (low_end <= -kInf || low_end >= kInf) {
        lo_finite = false;
      } else {
        s_lo += w * static_cast<double>(low_end);
        scale += std::fabs(w * static_cast<double>(low_end));
      }
      if (high_end <= -kInf || high_end >= kInf) {
        hi_finite = false;
      } else {
        s_hi += w * static_cast<double>(high_end);
        scale += std::fabs(w * static_cast<double>(high_end));
      }
      for (const auto& [b, a] : row.terms) reduced_[b] += w * static_cast<double>(a);
    }
    for (int b = 0; b < n_; ++b) {
      const double c = reduced_[b];
      scale += std::fabs(c);
      if (value_[b] >= 0) {
        x_lo += c * value_[b];
        x_hi += c * value_[b];
      } else {
        (c > 0 ? x_hi : x_lo) += c;
      }
    }
    const double margin = 1e-9 * (1.0 + scale);
    return (lo_finite && x_hi < s_lo - margin) || (hi_finite && x_lo > s_hi + margin);
  }

  // Solves the node LP. Returns false when the node can be discarded;
  // otherwise sets `branch` to the variable to split on.
  bool lp_node(int& branch) {
    const double cutoff = has_incumbent_ && step_ > 0
                              ? static_cast<double>(best_obj_ + step_) - 1e-6
                              : -std::numeric_limits<double>::infinity();
    auto result = lp_->solve(kMaxPivots, cutoff);
    for (int round = 0; round < kCutRounds && result == DualSimplex::Result::kOptimal; ++round) {
      for (int b = 0; b < n_; ++b) lp_value_[b] = value_[b] >= 0 ? 0.0 : lp_->value(b);
      const bool implied = add_implication_cuts();
      if (!add_clique_cuts() && !implied) break;
      result = lp_->solve(kMaxPivots, cutoff);
    }
    if (result == DualSimplex::Result::kInfeasible) return !infeasibility_proven();
    if (has_incumbent_ && !beats_incumbent(lagrangian_bound())) return false;
    if (result != DualSimplex::Result::kOptimal) return true;
    int pick = -1;
    double pick_value = -1.0;
    bool integral = true;
    for (int b = 0; b < n_; ++b) {
      if (value_[b] >= 0) continue;
      const double x = lp_->value(b);
      lp_value_[b] = x;
      if (x > 1e-6 && x < 1 - 1e-6) {
        integral = false;
        if (x > pick_value + 1e-9) {
          pick_value = x;
          pick = b;
        }
      }
    }
    if (integral && try_rounded()) {
      if (!beats_incumbent(lagrangian_bound())) return false;
    }
    if (pick >= 0) {
      branch = pick;
    } else {
      // Integral but not accepted: branch on a free variable the LP sets to 1.
      for (int b = 0; b < n_; ++b) {
        if (value_[b] < 0 && lp_value_[b] > 0.5) {
          branch = b;
          break;
        }
      }
    }
    return true;
  }

  // Checks the rounded LP point exactly and records it if it improves.
  bool try_rounded() {
    rounded_.assign(n_, 0);
    for (int b = 0; b < n_; ++b) {
      rounded_[b] = value_[b] >= 0 ? value_[b] : (lp_value_[b] > 0.5 ? 1 : 0);
    }
    for (const IntRow& row : p_.rows) {
      std::int64_t act = 0;
      for (const auto& [b, a] : row.terms) {
        if (rounded_[b]) act += a;
      }
      if (act < row.lo || act > row.hi) return false;
    }
    std::int64_t obj = 0;
    for (int b = 0; b < n_; ++b) {
      if (rounded_[b]) obj += p_.obj[b];
    }
    if (has_incumbent_ && obj <= best_obj_) return true;
    has_incumbent_ = true;
    best_obj_ = obj;
    best_ = rounded_;
    return true;
  }

  void record() {
    if (has_incumbent_ && fixed_obj_ <= best_obj_) return;
    has_incumbent_ = true;
    best_obj_ = fixed_obj_;
    best_ = value_;
  }

  static constexpr int kMaxPivots = 20000;
  static constexpr int kCutRounds = 5;
  static constexpr int kCutsPerRound = 50;
  static constexpr std::size_t kMaxCuts = 5000;
  static constexpr std::size_t kMaxConflictRow = 200;
  static constexpr std::size_t kMaxConflictPairs = 2000000;
  static constexpr std::size_t kMaxImplications = 2000000;

  const Prepared& p_;
  int n_;
  std::vector<signed char> value_;
  std::vector<std::int64_t> min_act_;
  std::vector<std::int64_t> max_act_;
  std::vector<std::int64_t> max_abs_;
  std::vector<char> queued_;
  std::vector<int> queue_;
  std::vector<std::vector<std::pair<int, std::int64_t>>> occ_;
  std::vector<std::vector<std::pair<int, std::int64_t>>> pack_occ_;
  std::vector<double> pi_;
  std::vector<int> touched_;
  std::vector<int> trail_;
  std::vector<Decision> stack_;
  std::unique_ptr<DualSimplex> lp_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> cand_;
  std::set<std::vector<int>> cut_keys_;
  std::vector<std::pair<int, int>> implications_;
  std::vector<char> implication_used_;
  std::vector<double> lp_value_;
  std::vector<double> reduced_;
  std::vector<signed char> rounded_;
  std::int64_t fixed_obj_ = 0;
  std::int64_t step_ = 0;
  bool has_incumbent_ = false;
  std::int64_t best_obj_ = 0;
  std::vector<signed char> best_;
  std::int64_t nodes_ = 0;
  bool timed_out_ = false;
  double budget_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

MilpSolution solve_exact(const MilpModel& model, const SolveOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  const Prepared p = prepare(model);
  MilpSolution sol;
  auto seconds = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  if (p.trivially_infeasible) {
    sol.status = SolveStatus::kInfeasible;
    sol.stats.seconds = seconds();
    return sol;
  }
  Search search(p, options.time_budget_seconds, options.use_lp);
  search.run();
  sol.stats.nodes = search.nodes();
  sol.stats.seconds = seconds();
  if (search.has_incumbent()) {
    const auto& best = search.incumbent();
    std::vector<Rational> bins(p.num_bins);
    for (int b = 0; b < p.num_bins; ++b) bins[b] = best[b] > 0 ? 1 : 0;
    sol.values.resize(model.num_variables());
    for (int v = 0; v < model.num_variables(); ++v) {
      if (p.bin_of_var[v] >= 0) {
        sol.values[v] = bins[p.bin_of_var[v]];
      } else {
        const Expr& e = *p.expr_of_var[v];
        Rational x = e.constant;
        for (const auto& [b, c] : e.terms) x += c * bins[b];
        sol.values[v] = x;
      }
    }
    sol.objective = model.objective_value(sol.values);
  }
  if (search.timed_out()) {
    sol.status = SolveStatus::kTimedOut;
  } else {
    sol.status = search.has_incumbent() ? SolveStatus::kOptimal : SolveStatus::kInfeasible;
  }
  return sol;
}

}  // namespace stablekep
