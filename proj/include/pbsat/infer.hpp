#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pbsat/model.hpp"
#include "pbsat/propagate.hpp"

namespace pbsat {

// Dense working form of  sum w_v l_v >= degree  used while combining
// constraints. Terms on the same variable are merged as they are added;
// opposite polarities cancel against the degree (l + ~l = 1).
class ConstraintAccumulator {
 public:
  explicit ConstraintAccumulator(Var num_vars = 0) { resize(num_vars); }
  void resize(Var num_vars);
  void clear();

  // Adds multiplier * c. Throws OverflowError.
  void add(const LinearConstraint& c, Weight multiplier = 1);
  void add_term(Lit l, Weight w);
  // Multiplies every term and the degree. Throws OverflowError.
  void scale(Weight factor);
  void saturate();
  void copy_from(const ConstraintAccumulator& other);

  Weight degree() const { return degree_; }
  // Weight on literal l (0 if the variable is absent or has the other polarity).
  Weight weight(Lit l) const;
  std::optional<Lit> literal(Var v) const;
  std::span<const Var> vars() const { return touched_; }

  // sum of non-falsified weights - degree
  Weight poss(const Trail& trail) const;
  // Normal form of the current content; degree <= 0 yields std::nullopt.
  std::optional<LinearConstraint> to_constraint() const;

 private:
  std::vector<Weight> signed_;  // > 0: weight on x_v, < 0: weight on ~x_v
  std::vector<uint8_t> in_list_;
  std::vector<Var> touched_;
  Weight degree_ = 0;
};

struct ResolveResult {
  enum class Kind { Ok, Tautology, Overflow };
  Kind kind = Kind::Ok;
  LinearConstraint constraint;
};

// Cancels `pivot` between c (which holds it with one polarity) and other (which
// holds the opposite one); both sides are scaled by the other's pivot weight
// divided by their gcd, summed, merged and saturated.
ResolveResult pb_resolve(const LinearConstraint& c, const LinearConstraint& other, Var pivot);

// Unit weights and degree ceil(k / max weight); implied by c.
LinearConstraint weaken_to_cardinality(const LinearConstraint& c);

// poss(c, P): c is i-irrelevant for every i up to this value.
Weight irrelevance(const LinearConstraint& c, const Trail& trail);

struct Analysis {
  enum class Kind { Learned, Unsatisfiable };
  Kind kind = Kind::Learned;
  LinearConstraint learned;
  int backjump_level = 0;
  bool fallback = false;  // learned the decision-cut clause
  bool weakened = false;  // a cardinality weakening was needed
  int resolutions = 0;
};

// Resolves backwards along the trail from the conflicting constraint, at least
// once, until the result is asserting below the current decision level. Falls back to the
// clause over the contributing decisions when cutting-plane resolution loses
// the conflict or overflows.
class ConflictAnalyzer {
 public:
  explicit ConflictAnalyzer(Var num_vars) : acc_(num_vars), trial_(num_vars), seen_(num_vars + 1, 0) {}
  Analysis analyze(const ConstraintDb& db, const Trail& trail, ConstraintId conflict);

  // Smallest level at which c (falsified under trail) is unit or conflicting.
  static int assertion_level(const LinearConstraint& c, const Trail& trail);
  // Negated decisions that the conflict depends on through reasons.
  LinearConstraint decision_cut(const ConstraintDb& db, const Trail& trail, ConstraintId conflict);

 private:
  bool asserting(const ConstraintAccumulator& acc, const Trail& trail, int level) const;
  // trial_ = scaled acc_ + scaled reason on var; false on overflow.
  bool resolve_into(const ConstraintAccumulator& base, const LinearConstraint& reason, Lit reason_lit,
                    ConstraintAccumulator& out) const;

  ConstraintAccumulator acc_;
  ConstraintAccumulator trial_;
  std::vector<uint8_t> seen_;
};

struct LearnedDbOptions {
  Weight relevance_bound = 3;
  size_t length_bound = 50;
  double decay_factor = 0.5;
  uint64_t decay_period = 64;  // conflicts between decays
};

// Learned constraints plus the per-literal activity counters that drive the
// activity and recency branching rules.
class LearnedDb {
 public:
  LearnedDb(Var num_vars, LearnedDbOptions options);

  void add(ConstraintId id, const LinearConstraint& c);
  // Oldest first.
  std::span<const ConstraintId> ids() const { return ids_; }
  size_t size() const { return ids_.size(); }
  size_t max_size() const { return max_size_; }
  const LearnedDbOptions& options() const { return options_; }

  // Removes learned constraints that are both too irrelevant and too long,
  // except reasons of trail literals. Returns the number removed.
  size_t reduce(ConstraintDb& db, PropagationEngine& engine, const Trail& trail);

  void bump(std::span<const Term> terms);
  void decay();
  // Called once per conflict; decays every decay_period conflicts.
  void on_conflict();
  double activity(Lit l) const { return activity_[l.index()]; }
  // Occurrences of l across all constraints ever learned (not decayed).
  uint64_t learned_occurrences(Lit l) const { return occurrences_[l.index()]; }

 private:
  LearnedDbOptions options_;
  std::vector<ConstraintId> ids_;
  std::vector<ConstraintId> long_ids_;
  std::vector<double> activity_;
  std::vector<uint64_t> occurrences_;
  size_t max_size_ = 0;
  size_t removed_since_purge_ = 0;
  uint64_t conflicts_ = 0;
};

}  // namespace pbsat
