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

#include "stablekep/milp.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "stablekep/errors.hpp"

namespace stablekep {
namespace {

constexpr double kTolerance = 1e-6;
constexpr std::size_t kLineWidth = 78;

const char* sense_token(RowSense sense) {
  switch (sense) {
    case RowSense::kLessEqual:
      return "<=";
    case RowSense::kGreaterEqual:
      return ">=";
    case RowSense::kEqual:
      return "=";
  }
  return "=";
}

bool satisfies(const Rational& lhs, RowSense sense, const Rational& rhs) {
  switch (sense) {
    case RowSense::kLessEqual:
      return lhs <= rhs;
    case RowSense::kGreaterEqual:
      return lhs >= rhs;
    case RowSense::kEqual:
      return lhs == rhs;
  }
  return false;
}

// Sums duplicate variables (first-appearance order) and drops zeros.
std::vector<Term> merged(const std::vector<Term>& terms) {
  std::vector<Term> out;
  std::map<int, std::size_t> slot;
  for (const Term& t : terms) {
    auto [it, fresh] = slot.emplace(t.var, out.size());
    if (fresh) {
      out.push_back(t);
    } else {
      out[it->second].coeff += t.coeff;
    }
  }
  std::vector<Term> kept;
  for (const Term& t : out) {
    if (!t.coeff.is_zero()) kept.push_back(t);
  }
  return kept;
}

// Writes "coeff name" pieces joined by signs, wrapping long lines.
void write_terms(std::ostream& out, std::string line, const std::vector<std::string>& pieces,
                 const std::string& tail) {
  bool first = true;
  for (const std::string& piece : pieces) {
    std::string p = piece;
    if (first) {
      if (p.rfind("+ ", 0) == 0) p = p.substr(2);
      if (p.rfind("- ", 0) == 0) p = "-" + p.substr(2);
    }
    if (!first && line.size() + 1 + p.size() > kLineWidth) {
      out << line << "\n";
      line = "  ";
    } else if (!first || line.back() != ' ') {
      line += " ";
    }
    line += p;
    first = false;
  }
  if (line.size() + 1 + tail.size() > kLineWidth && !tail.empty()) {
    out << line << "\n";
    line = "  ";
  }
  if (!tail.empty()) line += " " + tail;
  out << line << "\n";
}

std::string signed_piece(std::int64_t coeff, const std::string& name) {
  std::string sign = coeff < 0 ? "- " : "+ ";
  std::int64_t mag = coeff < 0 ? -coeff : coeff;
  if (mag == 1) return sign + name;
  return sign + std::to_string(mag) + " " + name;
}

std::string signed_piece(const Rational& coeff, const std::string& name) {
  std::string sign = coeff.sign() < 0 ? "- " : "+ ";
  Rational mag = coeff.sign() < 0 ? -coeff : coeff;
  if (mag == Rational(1)) return sign + name;
  return sign + mag.to_decimal() + " " + name;
}

std::string lower(std::string s) {
  for (char& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

// ---------------------------------------------------------------------------
// LP tokenizer

struct Token {
  enum Kind { kName, kNumber, kOp, kColon } kind;
  std::string text;
  int line;
};

std::vector<std::vector<Token>> tokenize_lines(std::istream& in) {
  std::vector<std::vector<Token>> lines;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::vector<Token> toks;
    std::size_t i = 0;
    while (i < raw.size()) {
      const char ch = raw[i];
      if (ch == '\\') break;
      if (std::isspace(static_cast<unsigned char>(ch))) {
        ++i;
      } else if (ch == ':') {
        toks.push_back({Token::kColon, ":", lineno});
        ++i;
      } else if (ch == '<' || ch == '>' || ch == '=') {
        std::string op(1, ch);
        ++i;
        if (i < raw.size() && raw[i] == '=') {
          if (ch != '=') op += '=';
          ++i;
        }
        if (op == "<") op = "<=";
        if (op == ">") op = ">=";
        toks.push_back({Token::kOp, op, lineno});
      } else if (ch == '+' || ch == '-') {
        toks.push_back({Token::kOp, std::string(1, ch), lineno});
        ++i;
      } else if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
        std::size_t j = i;
        while (j < raw.size() && (std::isdigit(static_cast<unsigned char>(raw[j])) ||
                                  raw[j] == '.' || raw[j] == '/')) {
          ++j;
        }
        if (j < raw.size() && (raw[j] == 'e' || raw[j] == 'E')) {
          std::size_t k = j + 1;
          if (k < raw.size() && (raw[k] == '+' || raw[k] == '-')) ++k;
          if (k < raw.size() && std::isdigit(static_cast<unsigned char>(raw[k]))) {
            j = k;
            while (j < raw.size() && std::isdigit(static_cast<unsigned char>(raw[j]))) ++j;
          }
        }
        toks.push_back({Token::kNumber, raw.substr(i, j - i), lineno});
        i = j;
      } else if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
        std::size_t j = i;
        while (j < raw.size() &&
               (std::isalnum(static_cast<unsigned char>(raw[j])) || raw[j] == '_')) {
          ++j;
        }
        toks.push_back({Token::kName, raw.substr(i, j - i), lineno});
        i = j;
      } else {
        throw ParseError("LP line " + std::to_string(lineno) + ": unexpected character '" +
                         std::string(1, ch) + "'");
      }
    }
    lines.push_back(std::move(toks));
  }
  return lines;
}

enum class Section { kNone, kObjective, kRows, kBounds, kBinaries, kEnd };

std::optional<Section> section_header(const std::vector<Token>& toks, ObjectiveSense& sense) {
  if (toks.empty() || toks[0].kind != Token::kName) return std::nullopt;
  const std::string w = lower(toks[0].text);
  if (toks.size() == 1) {
    if (w == "maximize" || w == "maximise" || w == "max") {
      sense = ObjectiveSense::kMaximize;
      return Section::kObjective;
    }
    if (w == "minimize" || w == "minimise" || w == "min") {
      sense = ObjectiveSense::kMinimize;
      return Section::kObjective;
    }
    if (w == "st") return Section::kRows;
    if (w == "bounds") return Section::kBounds;
    if (w == "binaries" || w == "binary" || w == "bin") return Section::kBinaries;
    if (w == "end") return Section::kEnd;
    if (w == "general" || w == "generals" || w == "semi") {
      throw ParseError("LP line " + std::to_string(toks[0].line) + ": section '" + toks[0].text +
                       "' is not supported");
    }
  }
  if (toks.size() == 2 && w == "subject" && lower(toks[1].text) == "to") return Section::kRows;
  return std::nullopt;
}

class LpReader {
 public:
  MilpModel run(std::istream& in) {
    auto lines = tokenize_lines(in);
    Section section = Section::kNone;
    ObjectiveSense sense = ObjectiveSense::kMaximize;
    std::vector<Token> pending;
    auto flush = [&]() {
      if (pending.empty()) return;
      if (section == Section::kObjective) {
        parse_objective(pending);
      } else if (section == Section::kRows) {
        parse_rows(pending);
      }
      pending.clear();
    };
    bool saw_objective = false;
    bool saw_end = false;
    for (auto& toks : lines) {
      if (toks.empty()) continue;
      if (auto next = section_header(toks, sense)) {
        flush();
        section = *next;
        if (section == Section::kObjective) saw_objective = true;
        if (section == Section::kEnd) saw_end = true;
        continue;
      }
      switch (section) {
        case Section::kNone:
          throw ParseError("LP line " + std::to_string(toks[0].line) +
                           ": content before the objective section");
        case Section::kObjective:
        case Section::kRows:
          pending.insert(pending.end(), toks.begin(), toks.end());
          break;
        case Section::kBounds:
          parse_bound(toks);
          break;
        case Section::kBinaries:
          for (const Token& t : toks) {
            if (t.kind != Token::kName) {
              throw ParseError("LP line " + std::to_string(t.line) + ": expected a variable name");
            }
            binaries_.push_back(var(t.text));
          }
          break;
        case Section::kEnd:
          throw ParseError("LP line " + std::to_string(toks[0].line) + ": content after End");
      }
    }
    flush();
    if (!saw_objective) throw ParseError("LP file has no objective section");
    if (!saw_end) throw ParseError("LP file is missing End");
    return assemble(sense);
  }

 private:
  int var(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    const int id = static_cast<int>(names_.size());
    names_.push_back(name);
    index_.emplace(name, id);
    objective_.emplace_back();
    upper_.emplace_back();
    continuous_bound_.push_back(false);
    return id;
  }

  [[noreturn]] static void fail(const Token& t, const std::string& what) {
    throw ParseError("LP line " + std::to_string(t.line) + ": " + what);
  }

  // Parses a linear expression from toks[pos..) until a sense operator or end.
  std::vector<Term> parse_expr(const std::vector<Token>& toks, std::size_t& pos,
                               Rational* constant) {
    std::vector<Term> terms;
    while (pos < toks.size()) {
      const Token& t = toks[pos];
      if (t.kind == Token::kOp && t.text != "+" && t.text != "-") break;
      Rational sign = 1;
      bool explicit_sign = false;
      while (pos < toks.size() && toks[pos].kind == Token::kOp &&
             (toks[pos].text == "+" || toks[pos].text == "-")) {
        if (toks[pos].text == "-") sign = -sign;
        explicit_sign = true;
        ++pos;
      }
      if (!explicit_sign && !terms.empty()) fail(t, "missing operator between terms");
      if (pos >= toks.size()) fail(t, "dangling sign");
      Rational coeff = 1;
      bool has_number = false;
      if (toks[pos].kind == Token::kNumber) {
        try {
          coeff = Rational::parse(toks[pos].text);
        } catch (const Error&) {
          fail(toks[pos], "bad number '" + toks[pos].text + "'");
        }
        has_number = true;
        ++pos;
      }
      if (pos < toks.size() && toks[pos].kind == Token::kName) {
        terms.push_back({var(toks[pos].text), sign * coeff});
        ++pos;
      } else if (has_number) {
        if (constant == nullptr) fail(toks[pos - 1], "constant term not allowed here");
        *constant += sign * coeff;
      } else {
        fail(pos < toks.size() ? toks[pos] : t, "expected a term");
      }
    }
    return terms;
  }

  void parse_objective(const std::vector<Token>& toks) {
    std::size_t pos = 0;
    if (toks.size() >= 2 && toks[0].kind == Token::kName && toks[1].kind == Token::kColon) {
      pos = 2;
    }
    Rational constant;
    auto terms = parse_expr(toks, pos, &constant);
    if (pos != toks.size()) fail(toks[pos], "unexpected token in objective");
    if (!constant.is_zero()) fail(toks[0], "objective constants are not supported");
    for (const Term& t : terms) objective_[t.var] += t.coeff;
  }

  void parse_rows(const std::vector<Token>& toks) {
    std::size_t pos = 0;
    while (pos < toks.size()) {
      std::string name;
      if (pos + 1 < toks.size() && toks[pos].kind == Token::kName &&
          toks[pos + 1].kind == Token::kColon) {
        name = toks[pos].text;
        pos += 2;
      } else {
        name = "R" + std::to_string(rows_.size() + 1);
      }
      const Token& start = toks[std::min(pos, toks.size() - 1)];
      Rational lhs_const;
      auto terms = parse_expr(toks, pos, &lhs_const);
      if (pos >= toks.size() || toks[pos].kind != Token::kOp) fail(start, "row without a sense");
      RowSense sense;
      const std::string& op = toks[pos].text;
      if (op == "<=") {
        sense = RowSense::kLessEqual;
      } else if (op == ">=") {
        sense = RowSense::kGreaterEqual;
      } else if (op == "=") {
        sense = RowSense::kEqual;
      } else {
        fail(toks[pos], "unknown operator '" + op + "'");
      }
      ++pos;
      Rational sign = 1;
      while (pos < toks.size() && toks[pos].kind == Token::kOp &&
             (toks[pos].text == "+" || toks[pos].text == "-")) {
        if (toks[pos].text == "-") sign = -sign;
        ++pos;
      }
      if (pos >= toks.size() || toks[pos].kind != Token::kNumber) fail(start, "row without a rhs");
      Rational rhs = sign * Rational::parse(toks[pos].text);
      ++pos;
      rows_.push_back({name, std::move(terms), sense, rhs - lhs_const});
    }
  }

  void parse_bound(const std::vector<Token>& toks) {
    // Forms: "lo <= x <= hi", "x >= lo", "x <= hi", "x = v".
    auto number = [&](std::size_t& pos) {
      Rational sign = 1;
      while (pos < toks.size() && toks[pos].kind == Token::kOp &&
             (toks[pos].text == "+" || toks[pos].text == "-")) {
        if (toks[pos].text == "-") sign = -sign;
        ++pos;
      }
      if (pos >= toks.size() || toks[pos].kind != Token::kNumber) fail(toks[0], "bad bound");
      return sign * Rational::parse(toks[pos++].text);
    };
    std::size_t pos = 0;
    std::optional<Rational> lo;
    std::optional<Rational> hi;
    int v = -1;
    if (toks[0].kind == Token::kName) {
      v = var(toks[0].text);
      pos = 1;
      if (pos >= toks.size() || toks[pos].kind != Token::kOp) fail(toks[0], "bad bound");
      if (toks.size() > pos && lower(toks[pos].text) == "free") fail(toks[0], "free is unsupported");
      const std::string op = toks[pos++].text;
      Rational value = number(pos);
      if (op == ">=") {
        lo = value;
      } else if (op == "<=") {
        hi = value;
      } else {
        lo = value;
        hi = value;
      }
    } else {
      lo = number(pos);
      if (pos >= toks.size() || toks[pos].text != "<=") fail(toks[0], "bad bound");
      ++pos;
      if (pos >= toks.size() || toks[pos].kind != Token::kName) fail(toks[0], "bad bound");
      v = var(toks[pos++].text);
      if (pos < toks.size()) {
        if (toks[pos].text != "<=") fail(toks[0], "bad bound");
        ++pos;
        hi = number(pos);
      }
    }
    if (pos != toks.size()) fail(toks[0], "trailing tokens in bound");
    if (lo && !lo->is_zero()) fail(toks[0], "only zero lower bounds are supported");
    continuous_bound_[v] = true;
    if (hi) upper_[v] = hi;
  }

  MilpModel assemble(ObjectiveSense sense) {
    std::vector<char> is_binary(names_.size(), 0);
    for (int b : binaries_) is_binary[b] = 1;
    MilpModel model(sense);
    for (std::size_t v = 0; v < names_.size(); ++v) {
      if (is_binary[v] && continuous_bound_[v]) {
        throw ParseError("LP variable " + names_[v] + " is both bounded and binary");
      }
      const VarKind kind = is_binary[v] ? VarKind::kBinary : VarKind::kContinuous;
      model.add_variable(names_[v], kind, objective_[v]);
      if (upper_[v]) model.set_upper(static_cast<int>(v), *upper_[v]);
    }
    for (auto& row : rows_) model.add_constraint(row.name, row.terms, row.sense, row.rhs);
    return model;
  }

  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
  std::vector<Rational> objective_;
  std::vector<std::optional<Rational>> upper_;
  std::vector<bool> continuous_bound_;
  std::vector<int> binaries_;
  std::vector<Constraint> rows_;
};

std::string value_text(const Rational& v) {
  try {
    return v.to_decimal();
  } catch (const Error&) {
    return v.to_string();
  }
}

SolveStatus parse_status(const std::string& word) {
  const std::string w = lower(word);
  if (w == "optimal") return SolveStatus::kOptimal;
  if (w == "infeasible") return SolveStatus::kInfeasible;
  if (w == "timeout" || w == "timedout" || w == "time_limit") return SolveStatus::kTimedOut;
  throw ParseError("solution status '" + word + "' is unknown");
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char ch : s) {
    if (ch == '\'') {
      out += "'\\''";
    } else {
      out += ch;
    }
  }
  return out + "'";
}

}  // namespace

// ---------------------------------------------------------------------------
// MilpModel

int MilpModel::add_variable(std::string name, VarKind kind, Rational objective) {
  if (!is_valid_lp_name(name)) throw InvalidArgument("invalid variable name '" + name + "'");
  if (var_index_.count(name)) throw InvalidArgument("duplicate variable name '" + name + "'");
  const int id = num_variables();
  var_index_.emplace(name, id);
  variables_.push_back({std::move(name), kind, objective, std::nullopt});
  return id;
}

int MilpModel::add_constraint(std::string name, std::vector<Term> terms, RowSense sense,
                              Rational rhs) {
  if (!is_valid_lp_name(name)) throw InvalidArgument("invalid row name '" + name + "'");
  if (row_index_.count(name)) throw InvalidArgument("duplicate row name '" + name + "'");
  for (const Term& t : terms) {
    if (t.var < 0 || t.var >= num_variables()) {
      throw InvalidArgument("row " + name + " references unknown variable " +
                            std::to_string(t.var));
    }
  }
  const int id = num_constraints();
  row_index_.emplace(name, id);
  constraints_.push_back({std::move(name), std::move(terms), sense, rhs});
  return id;
}

int MilpModel::num_binaries() const {
  int n = 0;
  for (const Variable& v : variables_) n += v.kind == VarKind::kBinary;
  return n;
}

std::optional<int> MilpModel::find_variable(const std::string& name) const {
  auto it = var_index_.find(name);
  if (it == var_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> MilpModel::find_constraint(const std::string& name) const {
  auto it = row_index_.find(name);
  if (it == row_index_.end()) return std::nullopt;
  return it->second;
}

Rational MilpModel::objective_value(const std::vector<Rational>& values) const {
  if (values.size() != variables_.size()) throw InvalidArgument("assignment size mismatch");
  Rational total;
  for (std::size_t v = 0; v < variables_.size(); ++v) {
    if (!variables_[v].objective.is_zero()) total += variables_[v].objective * values[v];
  }
  return total;
}

Rational MilpModel::row_activity(int row, const std::vector<Rational>& values) const {
  if (values.size() != variables_.size()) throw InvalidArgument("assignment size mismatch");
  Rational total;
  for (const Term& t : constraints_.at(row).terms) total += t.coeff * values[t.var];
  return total;
}

bool MilpModel::row_satisfied(int row, const std::vector<Rational>& values) const {
  const Constraint& c = constraints_.at(row);
  return satisfies(row_activity(row, values), c.sense, c.rhs);
}

std::optional<std::string> MilpModel::first_violation(const std::vector<Rational>& values) const {
  if (values.size() != variables_.size()) return "assignment size mismatch";
  for (std::size_t v = 0; v < variables_.size(); ++v) {
    const Variable& var = variables_[v];
    const Rational& x = values[v];
    if (x.sign() < 0) return "variable " + var.name + " is negative";
    if (var.kind == VarKind::kBinary && x != Rational(0) && x != Rational(1)) {
      return "variable " + var.name + " is not binary";
    }
    if (var.kind == VarKind::kContinuous && var.upper && x > *var.upper) {
      return "variable " + var.name + " exceeds its upper bound";
    }
  }
  for (int r = 0; r < num_constraints(); ++r) {
    if (!row_satisfied(r, values)) return "row " + constraints_[r].name + " is violated";
  }
  return std::nullopt;
}

bool is_valid_lp_name(const std::string& name) {
  if (name.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) return false;
  for (char ch : name) {
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_')) return false;
  }
  // Reserved words would be read back as section headers.
  static const char* const kReserved[] = {"st",   "end",     "bounds", "binaries", "binary",
                                          "bin",  "general", "max",    "min",      "maximize",
                                          "minimize", "free", "subject", "generals", "semi"};
  const std::string l = lower(name);
  for (const char* r : kReserved) {
    if (l == r) return false;
  }
  return true;
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kTimedOut:
      return "timeout";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// LP output

void write_lp(const MilpModel& model, std::ostream& out) {
  const auto& vars = model.variables();
  if (model.num_constraints() > 0 && vars.empty()) {
    throw InvalidArgument("cannot write rows for a model without variables");
  }
  out << (model.sense() == ObjectiveSense::kMaximize ? "Maximize" : "Minimize") << "\n";
  std::vector<std::string> pieces;
  for (const Variable& v : vars) {
    if (!v.objective.is_zero()) pieces.push_back(signed_piece(v.objective, v.name));
  }
  if (pieces.empty()) {
    out << " obj: 0\n";
  } else {
    write_terms(out, " obj:", pieces, "");
  }
  out << "Subject To\n";
  for (const Constraint& c : model.constraints()) {
    auto terms = merged(c.terms);
    std::int64_t scale = c.rhs.den();
    for (const Term& t : terms) scale = lcm_checked(scale, t.coeff.den());
    pieces.clear();
    for (const Term& t : terms) {
      const Rational scaled = t.coeff * Rational(scale);
      pieces.push_back(signed_piece(scaled.num(), vars[t.var].name));
    }
    if (pieces.empty()) pieces.push_back("0 " + vars[0].name);
    const Rational rhs = c.rhs * Rational(scale);
    write_terms(out, " " + c.name + ":", pieces,
                std::string(sense_token(c.sense)) + " " + std::to_string(rhs.num()));
  }
  bool any_bounds = false;
  for (const Variable& v : vars) any_bounds |= v.kind == VarKind::kContinuous;
  if (any_bounds) {
    out << "Bounds\n";
    for (const Variable& v : vars) {
      if (v.kind != VarKind::kContinuous) continue;
      if (v.upper) {
        out << " 0 <= " << v.name << " <= " << v.upper->to_decimal() << "\n";
      } else {
        out << " " << v.name << " >= 0\n";
      }
    }
  }
  if (model.num_binaries() > 0) {
    out << "Binaries\n";
    std::string line;
    for (const Variable& v : vars) {
      if (v.kind != VarKind::kBinary) continue;
      if (!line.empty() && line.size() + 1 + v.name.size() > kLineWidth) {
        out << line << "\n";
        line.clear();
      }
      line += " " + v.name;
    }
    out << line << "\n";
  }
  out << "End\n";
}

void write_lp(const MilpModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  write_lp(model, out);
}

std::string to_lp_string(const MilpModel& model) {
  std::ostringstream out;
  write_lp(model, out);
  return out.str();
}

MilpModel read_lp(std::istream& in) { return LpReader().run(in); }

MilpModel read_lp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_lp(in);
}

MilpModel relax_binaries(const MilpModel& model) {
  MilpModel out(model.sense());
  for (const Variable& v : model.variables()) {
    const int id = out.add_variable(v.name, VarKind::kContinuous, v.objective);
    if (v.kind == VarKind::kBinary) {
      out.set_upper(id, 1);
    } else if (v.upper) {
      out.set_upper(id, *v.upper);
    }
  }
  for (const Constraint& c : model.constraints()) {
    out.add_constraint(c.name, c.terms, c.sense, c.rhs);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Solutions

void write_solution(const MilpModel& model, const MilpSolution& solution, std::ostream& out) {
  out << "status " << to_string(solution.status) << "\n";
  out << "objective " << value_text(solution.objective) << "\n";
  if (!solution.has_assignment()) return;
  if (solution.values.size() != model.variables().size()) {
    throw InvalidArgument("solution size does not match the model");
  }
  for (std::size_t v = 0; v < solution.values.size(); ++v) {
    out << model.variables()[v].name << " " << value_text(solution.values[v]) << "\n";
  }
}

void write_solution(const MilpModel& model, const MilpSolution& solution,
                    const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  write_solution(model, solution, out);
}

MilpSolution read_solution(const MilpModel& model, std::istream& in) {
  MilpSolution sol;
  std::optional<SolveStatus> status;
  std::optional<double> recorded_objective;
  std::vector<double> raw(model.variables().size(), 0.0);
  bool any_value = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string key;
    std::string value;
    if (!(ss >> key)) continue;
    if (key[0] == '#') continue;
    if (!(ss >> value)) {
      throw ParseError("solution line " + std::to_string(lineno) + ": missing value");
    }
    if (key == "status") {
      status = parse_status(value);
      continue;
    }
    char* end = nullptr;
    const double x = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0' || !std::isfinite(x)) {
      throw ParseError("solution line " + std::to_string(lineno) + ": bad number '" + value + "'");
    }
    if (key == "objective") {
      recorded_objective = x;
      continue;
    }
    const auto v = model.find_variable(key);
    if (!v) {
      throw ParseError("solution line " + std::to_string(lineno) + ": unknown variable '" + key +
                       "'");
    }
    raw[*v] = x;
    any_value = true;
  }
  if (!status) throw ParseError("solution has no status line");
  sol.status = *status;
  if (sol.status == SolveStatus::kInfeasible) return sol;
  if (!any_value && sol.status == SolveStatus::kTimedOut) return sol;

  const auto& vars = model.variables();
  for (std::size_t v = 0; v < vars.size(); ++v) {
    if (raw[v] < -kTolerance) {
      throw SolverDisagreement("external solver disagreement: " + vars[v].name + " is negative");
    }
    if (vars[v].kind == VarKind::kBinary && std::fabs(raw[v] - std::round(raw[v])) > kTolerance) {
      throw SolverDisagreement("external solver disagreement: " + vars[v].name +
                               " is fractional");
    }
  }
  for (const Constraint& c : model.constraints()) {
    double lhs = 0;
    for (const Term& t : c.terms) lhs += t.coeff.to_double() * raw[t.var];
    const double rhs = c.rhs.to_double();
    const bool ok = (c.sense != RowSense::kLessEqual || lhs <= rhs + kTolerance) &&
                    (c.sense != RowSense::kGreaterEqual || lhs >= rhs - kTolerance) &&
                    (c.sense != RowSense::kEqual || std::fabs(lhs - rhs) <= kTolerance);
    if (!ok) {
      throw SolverDisagreement("external solver disagreement: row " + c.name + " is violated");
    }
  }

  // Round and re-check exactly.
  sol.values.resize(vars.size());
  for (std::size_t v = 0; v < vars.size(); ++v) {
    const double r = std::round(raw[v]);
    if (vars[v].kind == VarKind::kBinary || std::fabs(raw[v] - r) <= kTolerance) {
      sol.values[v] = Rational(static_cast<std::int64_t>(r));
    } else {
      sol.values[v] = Rational::parse(std::to_string(raw[v]));
    }
  }
  if (auto bad = model.first_violation(sol.values)) {
    throw SolverDisagreement("external solver disagreement after rounding: " + *bad);
  }
  sol.objective = model.objective_value(sol.values);
  if (recorded_objective) {
    const double exact = sol.objective.to_double();
    if (std::fabs(exact - *recorded_objective) > kTolerance * std::max(1.0, std::fabs(exact))) {
      throw SolverDisagreement("external solver disagreement: reported objective " +
                               std::to_string(*recorded_objective) + " but the assignment gives " +
                               sol.objective.to_string());
    }
  }
  return sol;
}

MilpSolution read_solution(const MilpModel& model, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_solution(model, in);
}

MilpSolution solve_external(const MilpModel& model, const std::string& command,
                            const std::filesystem::path& workdir) {
  std::filesystem::create_directories(workdir);
  const auto lp = workdir / "model.lp";
  const auto sol = workdir / "out.sol";
  std::filesystem::remove(sol);
  write_lp(model, lp);
  const std::string cmd = command + " " + shell_quote(lp.string()) + " " +
                          shell_quote(sol.string());
  const int rc = std::system(cmd.c_str());
  if (rc != 0) throw Error("external solver failed (exit status " + std::to_string(rc) + ")");
  return read_solution(model, sol);
}

}  // namespace stablekep
