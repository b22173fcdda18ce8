#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pbsat {

using Var = int32_t;
using Weight = int64_t;
using ConstraintId = int32_t;

inline constexpr ConstraintId kNoConstraint = -1;

// A literal is a variable (>= 1) with a polarity. Encoded as 2*var + negated
// so it can index per-literal tables directly.
class Lit {
 public:
  constexpr Lit() = default;
  static constexpr Lit positive(Var v) { return Lit(2 * v); }
  static constexpr Lit negative(Var v) { return Lit(2 * v + 1); }
  static constexpr Lit make(Var v, bool is_positive) { return is_positive ? positive(v) : negative(v); }
  static Lit from_dimacs(int64_t d);
  static constexpr Lit from_index(int32_t code) { return Lit(code); }

  constexpr Var var() const { return code_ >> 1; }
  constexpr bool is_positive() const { return (code_ & 1) == 0; }
  constexpr bool is_negative() const { return (code_ & 1) != 0; }
  constexpr int32_t index() const { return code_; }
  constexpr Lit operator~() const { return Lit(code_ ^ 1); }
  int64_t dimacs() const { return is_positive() ? var() : -static_cast<int64_t>(var()); }
  std::string to_string() const;

  constexpr auto operator<=>(const Lit&) const = default;

 private:
  constexpr explicit Lit(int32_t code) : code_(code) {}
  int32_t code_ = 0;
};

struct Term {
  Weight weight = 0;
  Lit lit;
  bool operator==(const Term&) const = default;
};

// Normal form  sum w_i l_i >= degree  with w_i > 0, degree >= 1, one term per
// variable, every weight <= degree. A constraint with no terms (degree >= 1)
// is the always-false constraint.
struct LinearConstraint {
  std::vector<Term> terms;
  Weight degree = 1;
  ConstraintId id = kNoConstraint;
  bool learned = false;
  double activity = 0.0;

  bool is_clause() const;
  bool is_cardinality() const;
  bool is_falsum() const { return terms.empty(); }
  Weight weight_sum() const;
  Weight max_weight() const;
  // Weight of the term on v, 0 if absent. `out` receives its literal.
  Weight weight_of(Var v, Lit* out = nullptr) const;
  // assignment is indexed by variable; entry 0 is unused.
  bool satisfied_by(const std::vector<bool>& assignment) const;
  // Orders terms by descending weight, then literal; gives a canonical layout.
  void sort_terms();
  std::string to_string() const;

  // Structural equality: terms (as sets) and degree. Ignores id/learned/activity.
  bool same_as(const LinearConstraint& other) const;
};

LinearConstraint make_clause(std::span<const Lit> lits);
LinearConstraint make_clause(std::initializer_list<Lit> lits);
// Unit weights, arbitrary degree. Input must not repeat variables.
LinearConstraint make_cardinality(std::span<const Lit> lits, Weight degree);

enum class Relation { GreaterEq, Equal };

struct RawTerm {
  Weight weight = 0;  // any nonzero integer
  Lit lit;
};

struct RawConstraint {
  std::vector<RawTerm> terms;
  Relation relation = Relation::GreaterEq;
  Weight rhs = 0;
  bool satisfied_by(const std::vector<bool>& assignment) const;
};

struct NormalizeResult {
  std::vector<LinearConstraint> constraints;  // 0, 1 or 2 entries
  bool contradiction = false;                 // some side can never hold
};

class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

class ExpansionTooLarge : public std::length_error {
 public:
  using std::length_error::length_error;
};

NormalizeResult normalize(const RawConstraint& raw);
LinearConstraint saturate(LinearConstraint c);

inline constexpr uint64_t kDefaultExpansionCap = 1u << 20;
// One clause per (m-k+1)-subset of the literals; C(m, k-1) clauses in total.
std::vector<LinearConstraint> cardinality_to_cnf(const LinearConstraint& c,
                                                 uint64_t cap = kDefaultExpansionCap);

// C(n, k) with saturation at UINT64_MAX.
uint64_t binomial(uint64_t n, uint64_t k);

struct InstanceMeta {
  std::string family;
  std::map<std::string, std::string> params;
};

struct Instance {
  Var num_vars = 0;
  std::vector<LinearConstraint> constraints;
  InstanceMeta meta;

  // Normalizes and appends; a contradiction is stored as the falsum.
  void add(const RawConstraint& raw);
  void add(LinearConstraint c);
  bool satisfied_by(const std::vector<bool>& assignment) const;
  // Index of the first violated constraint, or -1.
  int first_violated(const std::vector<bool>& assignment) const;
  bool all_clauses() const;
};

// Checked int64 helpers; throw OverflowError.
Weight checked_add(Weight a, Weight b);
Weight checked_mul(Weight a, Weight b);

}  // namespace pbsat

template <>
struct std::hash<pbsat::Lit> {
  size_t operator()(const pbsat::Lit& l) const noexcept { return std::hash<int32_t>()(l.index()); }
};
