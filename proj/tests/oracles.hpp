#pragma once

// Independent reference implementations used by the tests. Nothing here calls
// into the solver beyond the plain data types, so a bug in the library cannot
// hide behind a matching bug in its checker.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "pbsat/model.hpp"
#include "pbsat/propagate.hpp"

namespace oracle {

using pbsat::Instance;
using pbsat::LinearConstraint;
using pbsat::Lit;
using pbsat::RawConstraint;
using pbsat::Term;
using pbsat::Var;
using pbsat::Weight;

inline Lit pos(Var v) { return Lit::positive(v); }
inline Lit neg(Var v) { return Lit::negative(v); }

inline LinearConstraint lc(std::vector<Term> terms, Weight degree) {
  LinearConstraint c;
  c.terms = std::move(terms);
  c.degree = degree;
  return c;
}

// Bit v-1 of mask is the value of variable v.
inline std::vector<bool> assignment(uint64_t mask, Var n) {
  std::vector<bool> a(static_cast<size_t>(n) + 1, false);
  for (Var v = 1; v <= n; ++v) a[v] = (mask >> (v - 1)) & 1;
  return a;
}

inline bool lit_true(Lit l, uint64_t mask) {
  const bool val = (mask >> (l.var() - 1)) & 1;
  return l.is_positive() ? val : !val;
}

inline bool holds(const LinearConstraint& c, uint64_t mask) {
  Weight lhs = 0;
  for (const Term& t : c.terms)
    if (lit_true(t.lit, mask)) lhs += t.weight;
  return lhs >= c.degree;
}

inline bool holds(const RawConstraint& r, uint64_t mask) {
  Weight lhs = 0;
  for (const auto& t : r.terms)
    if (lit_true(t.lit, mask)) lhs += t.weight;
  return r.relation == pbsat::Relation::Equal ? lhs == r.rhs : lhs >= r.rhs;
}

inline bool holds(const std::vector<LinearConstraint>& cs, uint64_t mask) {
  for (const auto& c : cs)
    if (!holds(c, mask)) return false;
  return true;
}

inline std::vector<uint64_t> models(const std::vector<LinearConstraint>& cs, Var n) {
  std::vector<uint64_t> out;
  for (uint64_t m = 0; m < (uint64_t{1} << n); ++m)
    if (holds(cs, m)) out.push_back(m);
  return out;
}

inline bool satisfiable(const Instance& inst) {
  for (uint64_t m = 0; m < (uint64_t{1} << inst.num_vars); ++m)
    if (holds(inst.constraints, m)) return true;
  return false;
}

// Every model of `premises` satisfies `c`.
inline bool implied(const std::vector<LinearConstraint>& premises, const LinearConstraint& c, Var n) {
  for (uint64_t m = 0; m < (uint64_t{1} << n); ++m)
    if (holds(premises, m) && !holds(c, m)) return false;
  return true;
}

// Does some completion of the partial assignment satisfy c? Partial values are
// given per variable: 0 unassigned, 1 true, -1 false.
inline bool completable(const LinearConstraint& c, const std::vector<int>& partial) {
  Weight best = 0;
  for (const Term& t : c.terms) {
    const int v = partial[t.lit.var()];
    const bool can_be_true = v == 0 || (v == 1) == t.lit.is_positive();
    if (can_be_true) best += t.weight;
  }
  return best >= c.degree;
}

// Literals forced by the definition of unit-ness: unvalued l such that every
// completion satisfying c sets l true, found by enumerating completions.
inline std::vector<Lit> forced_by_enumeration(const LinearConstraint& c, const std::vector<int>& partial) {
  std::vector<Var> free;
  for (const Term& t : c.terms)
    if (partial[t.lit.var()] == 0) free.push_back(t.lit.var());
  std::vector<Lit> out;
  for (const Term& t : c.terms) {
    if (partial[t.lit.var()] != 0) continue;
    bool some_model = false, counterexample = false;
    for (uint64_t m = 0; m < (uint64_t{1} << free.size()); ++m) {
      std::vector<int> full = partial;
      for (size_t i = 0; i < free.size(); ++i) full[free[i]] = ((m >> i) & 1) ? 1 : -1;
      Weight lhs = 0;
      for (const Term& u : c.terms)
        if ((full[u.lit.var()] == 1) == u.lit.is_positive()) lhs += u.weight;
      if (lhs < c.degree) continue;
      some_model = true;
      if ((full[t.lit.var()] == 1) != t.lit.is_positive()) counterexample = true;
    }
    if (some_model && !counterexample) out.push_back(t.lit);
  }
  return out;
}

// Watching-set definition, checked over every partial assignment of c's
// variables in which each member of S is unvalued or true: c must never be
// unit, that is never unsatisfiable and never forcing a literal.
inline bool watching_by_definition(const LinearConstraint& c, const std::vector<Lit>& s) {
  Var n = 0;
  for (const Term& t : c.terms) n = std::max(n, t.lit.var());
  const size_t len = c.terms.size();
  uint64_t combos = 1;
  for (size_t i = 0; i < len; ++i) combos *= 3;
  for (uint64_t code = 0; code < combos; ++code) {
    std::vector<int> partial(static_cast<size_t>(n) + 1, 0);
    uint64_t rest = code;
    bool allowed = true;
    for (const Term& t : c.terms) {
      const int digit = static_cast<int>(rest % 3);
      rest /= 3;
      if (digit == 0) continue;
      const bool lit_value = digit == 1;
      partial[t.lit.var()] = lit_value == t.lit.is_positive() ? 1 : -1;
      if (!lit_value && std::find(s.begin(), s.end(), t.lit) != s.end()) allowed = false;
    }
    if (!allowed) continue;
    if (!completable(c, partial) || !forced_by_enumeration(c, partial).empty()) return false;
  }
  return true;
}

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(uint64_t seed) : rng(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  bool coin() { return uniform(0, 1) == 1; }

  std::vector<Var> distinct_vars(Var n, int count) {
    std::vector<Var> all;
    for (Var v = 1; v <= n; ++v) all.push_back(v);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(std::min<size_t>(all.size(), static_cast<size_t>(count)));
    return all;
  }

  Lit lit_of(Var v) { return coin() ? pos(v) : neg(v); }

  // Clause, cardinality or general PB constraint in normal form.
  LinearConstraint constraint(Var n, int max_len = 5) {
    const int len = uniform(1, std::min<int>(max_len, n));
    const auto vars = distinct_vars(n, len);
    LinearConstraint c;
    const int kind = uniform(0, 2);
    for (Var v : vars) c.terms.push_back({kind == 2 ? uniform(1, 4) : 1, lit_of(v)});
    Weight sum = 0;
    for (const Term& t : c.terms) sum += t.weight;
    if (kind == 0) c.degree = 1;
    else if (kind == 1) c.degree = uniform(1, len);
    else c.degree = uniform(1, static_cast<int>(sum));
    for (Term& t : c.terms) t.weight = std::min(t.weight, c.degree);
    return c;
  }

  Instance instance(Var n, int m, int max_len = 5) {
    Instance inst;
    inst.num_vars = n;
    for (int i = 0; i < m; ++i) inst.constraints.push_back(constraint(n, max_len));
    return inst;
  }

  // Looser mix aimed at the satisfiability threshold: mostly short clauses,
  // cardinality and PB constraints with at most half their weight required.
  // Random searches on these actually conflict and learn.
  LinearConstraint loose_constraint(Var n, int max_len = 5) {
    const int len = uniform(std::min<int>(2, n), std::min<int>(max_len, n));
    const auto vars = distinct_vars(n, len);
    LinearConstraint c;
    const int roll = uniform(0, 9);
    const int kind = roll < 6 ? 0 : roll < 8 ? 1 : 2;
    for (Var v : vars) c.terms.push_back({kind == 2 ? uniform(1, 4) : 1, lit_of(v)});
    Weight sum = 0;
    for (const Term& t : c.terms) sum += t.weight;
    if (kind == 0) c.degree = 1;
    else c.degree = uniform(1, std::max<int>(1, static_cast<int>(sum) / 2));
    for (Term& t : c.terms) t.weight = std::min(t.weight, c.degree);
    return c;
  }

  Instance loose_instance(Var n, int m, int max_len = 4) {
    Instance inst;
    inst.num_vars = n;
    for (int i = 0; i < m; ++i) inst.constraints.push_back(loose_constraint(n, max_len));
    return inst;
  }

  RawConstraint raw(Var n, int max_terms = 5) {
    RawConstraint r;
    const int len = uniform(0, max_terms);
    for (int i = 0; i < len; ++i) {
      int w = uniform(-4, 4);
      if (w == 0) w = 1;
      r.terms.push_back({w, lit_of(static_cast<Var>(uniform(1, n)))});  // repeats allowed
    }
    r.relation = uniform(0, 3) == 0 ? pbsat::Relation::Equal : pbsat::Relation::GreaterEq;
    r.rhs = uniform(-6, 8);
    return r;
  }
};

// Value table from a literal list, for the oracles above.
inline std::vector<int> partial_of(const std::vector<Lit>& lits, Var n) {
  std::vector<int> p(static_cast<size_t>(n) + 1, 0);
  for (Lit l : lits) p[l.var()] = l.is_positive() ? 1 : -1;
  return p;
}

// Trail with every literal pushed as a decision on level 1.
inline pbsat::Trail trail_of(const std::vector<Lit>& lits, Var n) {
  pbsat::Trail t(n);
  if (!lits.empty()) t.new_decision_level();
  for (Lit l : lits) t.push(l, pbsat::kNoConstraint);
  return t;
}

}  // namespace oracle

namespace oracle {

// Constraint store, trail and engine wired together the way the solver does it.
struct Harness {
  pbsat::ConstraintDb db;
  pbsat::Trail trail;
  std::unique_ptr<pbsat::PropagationEngine> engine;
  bool root_conflict = false;

  Harness(const Instance& inst, pbsat::EngineKind kind) : trail(inst.num_vars) {
    engine = pbsat::make_engine(kind, db, trail);
    std::vector<pbsat::ConstraintId> ids;
    for (const auto& c : inst.constraints) {
      ids.push_back(db.add(c));
      engine->attach(ids.back());
    }
    for (auto id : ids)
      if (!engine->assert_constraint(id)) root_conflict = true;
    if (!root_conflict && engine->propagate()) root_conflict = true;
  }

  void decide(Lit l) {
    trail.new_decision_level();
    engine->enqueue(l, pbsat::kNoConstraint);
  }

  std::vector<Lit> assigned() const {
    std::vector<Lit> out;
    for (const auto& e : trail.entries()) out.push_back(e.lit);
    std::sort(out.begin(), out.end());
    return out;
  }
};

}  // namespace oracle
