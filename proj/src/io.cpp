#include "pbsat/io.hpp"

#include <charconv>
#include <optional>
#include <sstream>

namespace pbsat {

namespace {

struct Token {
  std::string_view text;
  int line;
};

// Splits text into whitespace-separated tokens, skipping lines whose first
// non-blank character is one of `comment_chars`.
std::vector<Token> tokenize(std::string_view text, std::string_view comment_chars, bool stop_at_percent) {
  std::vector<Token> out;
  int line = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view row = text.substr(pos, end - pos);
    ++line;
    size_t first = row.find_first_not_of(" \t\r");
    if (first != std::string_view::npos) {
      const char lead = row[first];
      if (stop_at_percent && lead == '%') break;
      if (comment_chars.find(lead) == std::string_view::npos) {
        size_t i = first;
        while (i < row.size()) {
          while (i < row.size() && (row[i] == ' ' || row[i] == '\t' || row[i] == '\r')) ++i;
          size_t j = i;
          while (j < row.size() && row[j] != ' ' && row[j] != '\t' && row[j] != '\r') ++j;
          if (j > i) out.push_back({row.substr(i, j - i), line});
          i = j;
        }
      }
    }
    if (end == text.size()) break;
    pos = end + 1;
  }
  return out;
}

std::optional<int64_t> to_int(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

// Number of the last line, not counting a trailing newline.
int count_lines(std::string_view text) {
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.remove_suffix(1);
  int n = 1;
  for (char ch : text) n += ch == '\n';
  return n;
}

void add_checked(Instance& inst, const RawConstraint& raw, int line) {
  try {
    inst.add(raw);
  } catch (const OverflowError& e) {
    throw ParseError(line, std::string("weight overflow: ") + e.what());
  }
}

}  // namespace

Instance parse_dimacs(std::string_view text) {
  const auto tokens = tokenize(text, "c", true);
  if (tokens.empty() || tokens[0].text != "p") throw ParseError(tokens.empty() ? 1 : tokens[0].line, "missing 'p cnf' header");
  const int header_line = tokens[0].line;
  if (tokens.size() < 4 || tokens[1].text != "cnf" || tokens[2].line != header_line || tokens[3].line != header_line)
    throw ParseError(header_line, "malformed header, expected 'p cnf <vars> <clauses>'");
  const auto vars = to_int(tokens[2].text);
  const auto clauses = to_int(tokens[3].text);
  if (!vars || !clauses || *vars < 0 || *clauses < 0 || *vars > (int64_t{1} << 30))
    throw ParseError(header_line, "malformed header counts");
  if (tokens.size() > 4 && tokens[4].line == header_line) throw ParseError(header_line, "trailing tokens after header");

  Instance inst;
  inst.num_vars = static_cast<Var>(*vars);
  RawConstraint clause;
  clause.rhs = 1;
  bool open = false;
  int64_t seen = 0;
  for (size_t i = 4; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    const auto lit = to_int(t.text);
    if (!lit) throw ParseError(t.line, "expected an integer literal, got '" + std::string(t.text) + "'");
    if (*lit == 0) {
      add_checked(inst, clause, t.line);
      clause.terms.clear();
      open = false;
      ++seen;
      continue;
    }
    if (*lit > *vars || -*lit > *vars)
      throw ParseError(t.line, "literal " + std::to_string(*lit) + " exceeds declared variable count");
    clause.terms.push_back({1, Lit::from_dimacs(*lit)});
    open = true;
  }
  const int last = count_lines(text);
  if (open) throw ParseError(last, "last clause is missing its terminating 0");
  if (seen != *clauses)
    throw ParseError(last, "header declares " + std::to_string(*clauses) + " clauses, found " + std::to_string(seen));
  inst.num_vars = static_cast<Var>(*vars);
  return inst;
}

Instance parse_opb(std::string_view text) {
  Instance inst;
  std::optional<int64_t> declared_vars, declared_constraints;
  // Header comment: "* #variable= V #constraint= C"
  {
    std::istringstream in{std::string(text)};
    std::string row;
    int line = 0;
    while (std::getline(in, row)) {
      ++line;
      const size_t first = row.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      if (row[first] != '*') break;
      std::istringstream ls(row.substr(first + 1));
      std::string key, value;
      while (ls >> key) {
        if (key != "#variable=" && key != "#constraint=") continue;
        if (!(ls >> value)) throw ParseError(line, "malformed header");
        const auto v = to_int(value);
        if (!v || *v < 0) throw ParseError(line, "malformed header count");
        (key == "#variable=" ? declared_vars : declared_constraints) = *v;
      }
      break;
    }
  }

  const auto tokens = tokenize(text, "*", false);
  RawConstraint raw;
  int64_t pending_weight = 0;
  bool has_weight = false;
  int state = 0;  // 0: terms, 1: expect rhs, 2: expect ';'
  int64_t count = 0;
  for (const Token& t : tokens) {
    std::string_view s = t.text;
    if (s == "min:" || s == "max:") throw ParseError(t.line, "objective functions are not supported");
    if (state == 0) {
      if (s == ">=" || s == "=") {
        if (has_weight) throw ParseError(t.line, "weight without a literal");
        raw.relation = s == "=" ? Relation::Equal : Relation::GreaterEq;
        state = 1;
        continue;
      }
      if (s == "<=" || s == ">" || s == "<") throw ParseError(t.line, "unsupported relation '" + std::string(s) + "'");
      if (s == ";") throw ParseError(t.line, "constraint without relation");
      if (s.front() == 'x' || s.front() == '~') {
        const bool negated = s.front() == '~';
        std::string_view name = negated ? s.substr(1) : s;
        if (name.empty() || name.front() != 'x') throw ParseError(t.line, "bad literal '" + std::string(s) + "'");
        const auto index = to_int(name.substr(1));
        if (!index || *index < 1 || *index > (int64_t{1} << 30) || name[1] == '+')
          throw ParseError(t.line, "bad variable '" + std::string(s) + "'");
        if (declared_vars && *index > *declared_vars)
          throw ParseError(t.line, "variable " + std::string(s) + " exceeds declared variable count");
        if (!has_weight) throw ParseError(t.line, "literal without a weight");
        const Var v = static_cast<Var>(*index);
        if (pending_weight != 0) raw.terms.push_back({pending_weight, Lit::make(v, !negated)});
        inst.num_vars = std::max(inst.num_vars, v);
        has_weight = false;
        continue;
      }
      const auto w = to_int(s);
      if (!w) throw ParseError(t.line, "unexpected token '" + std::string(s) + "'");
      if (has_weight) throw ParseError(t.line, "two weights in a row");
      pending_weight = *w;
      has_weight = true;
      continue;
    }
    if (state == 1) {
      // "k;" is accepted as well as "k ;"
      const bool glued = s.size() > 1 && s.back() == ';';
      const auto k = to_int(glued ? s.substr(0, s.size() - 1) : s);
      if (!k) throw ParseError(t.line, "expected right-hand side, got '" + std::string(s) + "'");
      raw.rhs = *k;
      state = 2;
      if (!glued) continue;
      s = ";";
    }
    if (s != ";") throw ParseError(t.line, "expected ';'");
    add_checked(inst, raw, t.line);
    raw = RawConstraint{};
    state = 0;
    ++count;
  }
  const int last = count_lines(text);
  if (state != 0 || has_weight || !raw.terms.empty()) throw ParseError(last, "unterminated constraint");
  if (declared_constraints && *declared_constraints != count)
    throw ParseError(last, "header declares " + std::to_string(*declared_constraints) + " constraints, found " +
                               std::to_string(count));
  if (declared_vars) inst.num_vars = std::max<Var>(inst.num_vars, static_cast<Var>(*declared_vars));
  return inst;
}

Instance parse_instance(std::string_view text) {
  const size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && (text[first] == 'c' || text[first] == 'p')) return parse_dimacs(text);
  return parse_opb(text);
}

std::string write_dimacs(const Instance& instance) {
  if (!instance.all_clauses()) throw std::invalid_argument("instance contains non-clausal constraints");
  std::ostringstream out;
  if (!instance.meta.family.empty()) {
    out << "c " << instance.meta.family;
    for (const auto& [k, v] : instance.meta.params) out << ' ' << k << '=' << v;
    out << '\n';
  }
  out << "p cnf " << instance.num_vars << ' ' << instance.constraints.size() << '\n';
  for (const LinearConstraint& c : instance.constraints) {
    for (const Term& t : c.terms) out << t.lit.dimacs() << ' ';
    out << "0\n";
  }
  return out.str();
}

std::string write_opb(const Instance& instance) {
  std::ostringstream out;
  out << "* #variable= " << instance.num_vars << " #constraint= " << instance.constraints.size() << '\n';
  if (!instance.meta.family.empty()) {
    out << "* " << instance.meta.family;
    for (const auto& [k, v] : instance.meta.params) out << ' ' << k << '=' << v;
    out << '\n';
  }
  for (const LinearConstraint& c : instance.constraints) {
    for (const Term& t : c.terms) out << '+' << t.weight << ' ' << t.lit.to_string() << ' ';
    out << ">= " << c.degree << " ;\n";
  }
  return out.str();
}

std::vector<bool> parse_model(std::string_view text, Var num_vars) {
  const auto tokens = tokenize(text, "cs", false);
  std::vector<int8_t> value(static_cast<size_t>(num_vars) + 1, 0);
  for (const Token& t : tokens) {
    if (t.text == "v") continue;
    const auto lit = to_int(t.text);
    if (!lit) throw ParseError(t.line, "expected a signed integer, got '" + std::string(t.text) + "'");
    if (*lit == 0) continue;
    const int64_t var = *lit < 0 ? -*lit : *lit;
    if (var > num_vars) throw ParseError(t.line, "variable " + std::to_string(var) + " out of range");
    const int8_t sign = *lit > 0 ? 1 : -1;
    if (value[var] == -sign) throw ParseError(t.line, "variable " + std::to_string(var) + " given both values");
    value[var] = sign;
  }
  std::vector<bool> model(static_cast<size_t>(num_vars) + 1, false);
  for (Var v = 1; v <= num_vars; ++v) {
    if (value[v] == 0) throw ParseError(count_lines(text), "variable " + std::to_string(v) + " has no value");
    model[v] = value[v] > 0;
  }
  return model;
}

std::string format_model(const std::vector<bool>& model, size_t per_line) {
  std::ostringstream out;
  size_t on_line = 0;
  for (size_t v = 1; v < model.size(); ++v) {
    if (on_line == 0) out << 'v';
    out << ' ' << (model[v] ? "" : "-") << v;
    if (++on_line == per_line) {
      out << '\n';
      on_line = 0;
    }
  }
  out << (on_line == 0 ? "v 0\n" : " 0\n");
  return out.str();
}

VerifyResult verify(const Instance& instance, const std::vector<bool>& model) {
  if (model.size() != static_cast<size_t>(instance.num_vars) + 1)
    throw std::invalid_argument("model covers " + std::to_string(model.empty() ? 0 : model.size() - 1) +
                                " variables, instance has " + std::to_string(instance.num_vars));
  VerifyResult r;
  r.first_violated = instance.first_violated(model);
  r.ok = r.first_violated < 0;
  return r;
}

}  // namespace pbsat
