#include "pbsat/model.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace pbsat {

Weight checked_add(Weight a, Weight b) {
  Weight r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("weight sum overflows int64");
  return r;
}

Weight checked_mul(Weight a, Weight b) {
  Weight r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("weight product overflows int64");
  return r;
}

Lit Lit::from_dimacs(int64_t d) {
  if (d == 0 || d > std::numeric_limits<Var>::max() / 2 || -d > std::numeric_limits<Var>::max() / 2)
    throw std::invalid_argument("literal out of range: " + std::to_string(d));
  return d > 0 ? positive(static_cast<Var>(d)) : negative(static_cast<Var>(-d));
}

std::string Lit::to_string() const { return (is_positive() ? "x" : "~x") + std::to_string(var()); }

bool LinearConstraint::is_clause() const { return degree == 1 && is_cardinality(); }

bool LinearConstraint::is_cardinality() const {
  return std::all_of(terms.begin(), terms.end(), [](const Term& t) { return t.weight == 1; });
}

Weight LinearConstraint::weight_sum() const {
  Weight s = 0;
  for (const Term& t : terms) s = checked_add(s, t.weight);
  return s;
}

Weight LinearConstraint::max_weight() const {
  Weight m = 0;
  for (const Term& t : terms) m = std::max(m, t.weight);
  return m;
}

Weight LinearConstraint::weight_of(Var v, Lit* out) const {
  for (const Term& t : terms) {
    if (t.lit.var() == v) {
      if (out) *out = t.lit;
      return t.weight;
    }
  }
  return 0;
}

bool LinearConstraint::satisfied_by(const std::vector<bool>& assignment) const {
  Weight sum = 0;
  for (const Term& t : terms) {
    if (assignment[t.lit.var()] == t.lit.is_positive()) sum += t.weight;
  }
  return sum >= degree;
}

void LinearConstraint::sort_terms() {
  std::stable_sort(terms.begin(), terms.end(),
                   [](const Term& a, const Term& b) { return a.weight > b.weight; });
}

std::string LinearConstraint::to_string() const {
  std::ostringstream os;
  for (size_t i = 0; i < terms.size(); ++i) {
    if (i) os << " + ";
    if (terms[i].weight != 1) os << terms[i].weight;
    os << terms[i].lit.to_string();
  }
  if (terms.empty()) os << "0";
  os << " >= " << degree;
  return os.str();
}

bool LinearConstraint::same_as(const LinearConstraint& other) const {
  if (degree != other.degree || terms.size() != other.terms.size()) return false;
  auto key = [](const Term& t) { return std::pair(t.lit.index(), t.weight); };
  std::vector<std::pair<int32_t, Weight>> a, b;
  for (const Term& t : terms) a.push_back(key(t));
  for (const Term& t : other.terms) b.push_back(key(t));
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

LinearConstraint make_clause(std::span<const Lit> lits) { return make_cardinality(lits, 1); }

LinearConstraint make_clause(std::initializer_list<Lit> lits) {
  return make_clause(std::span<const Lit>(lits.begin(), lits.size()));
}

LinearConstraint make_cardinality(std::span<const Lit> lits, Weight degree) {
  LinearConstraint c;
  c.degree = degree;
  c.terms.reserve(lits.size());
  for (Lit l : lits) c.terms.push_back({1, l});
  return c;
}

bool RawConstraint::satisfied_by(const std::vector<bool>& assignment) const {
  Weight sum = 0;
  for (const RawTerm& t : terms) {
    if (assignment[t.lit.var()] == t.lit.is_positive()) sum += t.weight;
  }
  return relation == Relation::Equal ? sum == rhs : sum >= rhs;
}

namespace {

// Normalizes  sum terms >= rhs  (weights of either sign, repeated variables).
// Returns false on contradiction; an empty optional-like flag marks tautology.
struct SideResult {
  bool tautology = false;
  bool contradiction = false;
  LinearConstraint constraint;
};

SideResult normalize_side(const std::vector<RawTerm>& terms, Weight rhs) {
  // Signed coefficient on the positive literal of each variable. A negated
  // literal w*~x contributes w - w*x, i.e. -w on x and -w on the rhs; this is
  // the cancellation x + ~x = 1 applied term by term.
  std::vector<Var> order;
  std::unordered_map<Var, Weight> coef;
  for (const RawTerm& t : terms) {
    if (t.weight == 0) continue;
    Var v = t.lit.var();
    if (!coef.count(v)) order.push_back(v);
    if (t.lit.is_positive()) {
      coef[v] = checked_add(coef[v], t.weight);
    } else {
      coef[v] = checked_add(coef[v], -t.weight);
      rhs = checked_add(rhs, -t.weight);
    }
  }
  SideResult out;
  LinearConstraint& c = out.constraint;
  for (Var v : order) {
    Weight w = coef[v];
    if (w > 0) {
      c.terms.push_back({w, Lit::positive(v)});
    } else if (w < 0) {
      c.terms.push_back({-w, Lit::negative(v)});
      rhs = checked_add(rhs, -w);
    }
  }
  c.degree = rhs;
  if (rhs <= 0) {
    out.tautology = true;
    return out;
  }
  if (c.weight_sum() < rhs) {
    out.contradiction = true;
    return out;
  }
  c = saturate(std::move(c));
  c.sort_terms();
  return out;
}

}  // namespace

NormalizeResult normalize(const RawConstraint& raw) {
  NormalizeResult result;
  auto take = [&](SideResult&& side) {
    if (side.contradiction) {
      result.contradiction = true;
    } else if (!side.tautology) {
      result.constraints.push_back(std::move(side.constraint));
    }
  };
  take(normalize_side(raw.terms, raw.rhs));
  if (raw.relation == Relation::Equal) {
    std::vector<RawTerm> negated = raw.terms;
    for (RawTerm& t : negated) t.weight = checked_mul(t.weight, -1);
    take(normalize_side(negated, checked_mul(raw.rhs, -1)));
  }
  if (result.contradiction) result.constraints.clear();
  return result;
}

LinearConstraint saturate(LinearConstraint c) {
  for (Term& t : c.terms) t.weight = std::min(t.weight, c.degree);
  return c;
}

uint64_t binomial(uint64_t n, uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<uint64_t>::max()) return std::numeric_limits<uint64_t>::max();
  }
  return static_cast<uint64_t>(r);
}

std::vector<LinearConstraint> cardinality_to_cnf(const LinearConstraint& c, uint64_t cap) {
  if (!c.is_cardinality()) throw std::invalid_argument("cardinality_to_cnf: weights must all be 1");
  const uint64_t m = c.terms.size();
  if (c.degree <= 0) return {};
  const uint64_t k = static_cast<uint64_t>(c.degree);
  if (k > m) return {LinearConstraint{}};  // at least k of fewer than k literals
  const uint64_t count = binomial(m, k - 1);
  if (count > cap) {
    throw ExpansionTooLarge("cardinality expansion needs " + std::to_string(count) +
                            " clauses (cap " + std::to_string(cap) + ")");
  }
  const size_t len = m - k + 1;
  std::vector<LinearConstraint> out;
  out.reserve(count);
  std::vector<size_t> pick(len);
  for (size_t i = 0; i < len; ++i) pick[i] = i;
  while (true) {
    LinearConstraint clause;
    clause.degree = 1;
    for (size_t i : pick) clause.terms.push_back({1, c.terms[i].lit});
    out.push_back(std::move(clause));
    // next combination in lexicographic order
    size_t i = len;
    while (i > 0 && pick[i - 1] == m - len + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (size_t j = i; j < len; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

void Instance::add(const RawConstraint& raw) {
  for (const RawTerm& t : raw.terms) num_vars = std::max(num_vars, t.lit.var());
  NormalizeResult r = normalize(raw);
  if (r.contradiction) {
    constraints.push_back(LinearConstraint{});
    return;
  }
  for (LinearConstraint& c : r.constraints) constraints.push_back(std::move(c));
}

void Instance::add(LinearConstraint c) {
  for (const Term& t : c.terms) num_vars = std::max(num_vars, t.lit.var());
  constraints.push_back(std::move(c));
}

bool Instance::satisfied_by(const std::vector<bool>& assignment) const {
  return first_violated(assignment) < 0;
}

int Instance::first_violated(const std::vector<bool>& assignment) const {
  for (size_t i = 0; i < constraints.size(); ++i) {
    if (!constraints[i].satisfied_by(assignment)) return static_cast<int>(i);
  }
  return -1;
}

bool Instance::all_clauses() const {
  return std::all_of(constraints.begin(), constraints.end(),
                     [](const LinearConstraint& c) { return c.is_clause() || c.is_falsum(); });
}

}  // namespace pbsat
