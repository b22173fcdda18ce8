#include "pbsat/infer.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

namespace pbsat {

void ConstraintAccumulator::resize(Var num_vars) {
  signed_.resize(static_cast<size_t>(num_vars) + 1, 0);
  in_list_.resize(static_cast<size_t>(num_vars) + 1, 0);
}

void ConstraintAccumulator::clear() {
  for (Var v : touched_) {
    signed_[v] = 0;
    in_list_[v] = 0;
  }
  touched_.clear();
  degree_ = 0;
}

void ConstraintAccumulator::add_term(Lit l, Weight w) {
  const Var v = l.var();
  if (static_cast<size_t>(v) >= signed_.size()) resize(v);
  if (!in_list_[v]) {
    in_list_[v] = 1;
    touched_.push_back(v);
  }
  const Weight s = signed_[v];
  const Weight delta = l.is_positive() ? w : -w;
  if (s != 0 && (s > 0) != (delta > 0)) {
    degree_ = checked_add(degree_, -std::min(s > 0 ? s : -s, w));
  }
  signed_[v] = checked_add(s, delta);
}

void ConstraintAccumulator::add(const LinearConstraint& c, Weight multiplier) {
  for (const Term& t : c.terms) add_term(t.lit, checked_mul(t.weight, multiplier));
  degree_ = checked_add(degree_, checked_mul(c.degree, multiplier));
}

void ConstraintAccumulator::scale(Weight factor) {
  if (factor == 1) return;
  for (Var v : touched_) signed_[v] = checked_mul(signed_[v], factor);
  degree_ = checked_mul(degree_, factor);
}

void ConstraintAccumulator::saturate() {
  if (degree_ <= 0) return;
  for (Var v : touched_) {
    Weight& s = signed_[v];
    if (s > degree_) s = degree_;
    if (s < -degree_) s = -degree_;
  }
}

void ConstraintAccumulator::copy_from(const ConstraintAccumulator& other) {
  clear();
  if (signed_.size() < other.signed_.size()) resize(static_cast<Var>(other.signed_.size()) - 1);
  for (Var v : other.touched_) {
    signed_[v] = other.signed_[v];
    in_list_[v] = 1;
    touched_.push_back(v);
  }
  degree_ = other.degree_;
}

Weight ConstraintAccumulator::weight(Lit l) const {
  if (static_cast<size_t>(l.var()) >= signed_.size()) return 0;
  const Weight s = signed_[l.var()];
  if (l.is_positive()) return s > 0 ? s : 0;
  return s < 0 ? -s : 0;
}

std::optional<Lit> ConstraintAccumulator::literal(Var v) const {
  if (static_cast<size_t>(v) >= signed_.size() || signed_[v] == 0) return std::nullopt;
  return Lit::make(v, signed_[v] > 0);
}

Weight ConstraintAccumulator::poss(const Trail& trail) const {
  Weight p = -degree_;
  for (Var v : touched_) {
    const Weight s = signed_[v];
    if (s == 0) continue;
    if (!trail.is_false(Lit::make(v, s > 0))) p += s > 0 ? s : -s;
  }
  return p;
}

std::optional<LinearConstraint> ConstraintAccumulator::to_constraint() const {
  if (degree_ <= 0) return std::nullopt;
  LinearConstraint c;
  c.degree = degree_;
  for (Var v : touched_) {
    const Weight s = signed_[v];
    if (s > 0) c.terms.push_back({s, Lit::positive(v)});
    if (s < 0) c.terms.push_back({-s, Lit::negative(v)});
  }
  c.sort_terms();
  return c;
}

ResolveResult pb_resolve(const LinearConstraint& c, const LinearConstraint& other, Var pivot) {
  Lit lc, lo;
  const Weight wc = c.weight_of(pivot, &lc);
  const Weight wo = other.weight_of(pivot, &lo);
  if (wc == 0 || wo == 0 || lc != ~lo) throw std::invalid_argument("pb_resolve: pivot must occur with opposite signs");
  const Weight g = std::gcd(wc, wo);
  ResolveResult r;
  try {
    ConstraintAccumulator acc;
    acc.add(c, wo / g);
    acc.add(other, wc / g);
    acc.saturate();
    auto out = acc.to_constraint();
    if (!out) {
      r.kind = ResolveResult::Kind::Tautology;
      return r;
    }
    r.constraint = std::move(*out);
  } catch (const OverflowError&) {
    r.kind = ResolveResult::Kind::Overflow;
  }
  return r;
}

LinearConstraint weaken_to_cardinality(const LinearConstraint& c) {
  LinearConstraint out;
  out.terms = c.terms;
  for (Term& t : out.terms) t.weight = 1;
  const Weight m = c.max_weight();
  out.degree = m == 0 ? c.degree : (c.degree + m - 1) / m;
  return out;
}

Weight irrelevance(const LinearConstraint& c, const Trail& trail) { return curr_poss(c, trail).poss; }

// ---------------------------------------------------------------------------

bool ConflictAnalyzer::asserting(const ConstraintAccumulator& acc, const Trail& trail, int level) const {
  const Weight poss = acc.poss(trail);
  if (poss >= 0) return false;
  Weight below = poss;
  Weight max_free = 0;
  for (Var v : acc.vars()) {
    auto l = acc.literal(v);
    if (!l) continue;
    const Weight w = acc.weight(*l);
    if (!trail.is_assigned(v)) {
      max_free = std::max(max_free, w);
    } else if (trail.level(v) >= level) {
      if (trail.is_false(*l)) below += w;
      max_free = std::max(max_free, w);
    }
  }
  return below < 0 || max_free > below;
}

int ConflictAnalyzer::assertion_level(const LinearConstraint& c, const Trail& trail) {
  struct Item {
    int level;
    Weight weight;
    bool falsified;
  };
  std::vector<Item> assigned;
  Weight total = 0, max_unassigned = 0;
  for (const Term& t : c.terms) {
    total += t.weight;
    const Var v = t.lit.var();
    if (trail.is_assigned(v)) {
      assigned.push_back({trail.level(v), t.weight, trail.is_false(t.lit)});
    } else {
      max_unassigned = std::max(max_unassigned, t.weight);
    }
  }
  std::sort(assigned.begin(), assigned.end(), [](const Item& a, const Item& b) { return a.level < b.level; });
  // suffix_max[i]: largest weight among assigned[i..]
  std::vector<Weight> suffix_max(assigned.size() + 1, 0);
  for (size_t i = assigned.size(); i-- > 0;) suffix_max[i] = std::max(suffix_max[i + 1], assigned[i].weight);

  Weight poss = total - c.degree;
  size_t i = 0;
  int level = 0;
  const int top = trail.decision_level();
  while (true) {
    while (i < assigned.size() && assigned[i].level <= level) {
      if (assigned[i].falsified) poss -= assigned[i].weight;
      ++i;
    }
    const Weight max_free = std::max(max_unassigned, suffix_max[i]);
    if (poss < 0 || max_free > poss) return level;
    if (i == assigned.size() || level >= top) return top;
    level = assigned[i].level;
  }
}

LinearConstraint ConflictAnalyzer::decision_cut(const ConstraintDb& db, const Trail& trail, ConstraintId conflict) {
  std::vector<Var> stack, visited;
  for (const Term& t : db[conflict].terms) {
    if (trail.is_false(t.lit)) stack.push_back(t.lit.var());
  }
  std::vector<Lit> clause;
  while (!stack.empty()) {
    const Var v = stack.back();
    stack.pop_back();
    if (seen_[v]) continue;
    seen_[v] = 1;
    visited.push_back(v);
    if (trail.level(v) == 0) continue;
    const ConstraintId r = trail.reason(v);
    if (r == kNoConstraint) {
      const Lit decided = Lit::make(v, trail.is_true(Lit::positive(v)));
      clause.push_back(~decided);
      continue;
    }
    for (const Term& t : db[r].terms) {
      const Var u = t.lit.var();
      if (!seen_[u] && trail.is_false(t.lit) && trail.position(u) < trail.position(v)) stack.push_back(u);
    }
  }
  for (Var v : visited) seen_[v] = 0;
  std::sort(clause.begin(), clause.end(),
            [&](Lit a, Lit b) { return trail.level(a.var()) > trail.level(b.var()); });
  return make_clause(clause);
}

bool ConflictAnalyzer::resolve_into(const ConstraintAccumulator& base, const LinearConstraint& reason,
                                    Lit reason_lit, ConstraintAccumulator& out) const {
  const Weight wa = base.weight(~reason_lit);
  const Weight wr = reason.weight_of(reason_lit.var());
  assert(wa > 0 && wr > 0);
  const Weight g = std::gcd(wa, wr);
  try {
    out.copy_from(base);
    out.scale(wr / g);
    out.add(reason, wa / g);
    out.saturate();
  } catch (const OverflowError&) {
    return false;
  }
  return true;
}

Analysis ConflictAnalyzer::analyze(const ConstraintDb& db, const Trail& trail, ConstraintId conflict) {
  Analysis out;
  const int level = trail.decision_level();
  if (level == 0) {
    out.kind = Analysis::Kind::Unsatisfiable;
    return out;
  }
  if (static_cast<size_t>(trail.num_vars()) + 1 > seen_.size()) {
    seen_.resize(trail.num_vars() + 1, 0);
    acc_.resize(trail.num_vars());
    trial_.resize(trail.num_vars());
  }

  bool fallback = false;
  acc_.clear();
  acc_.add(db[conflict]);
  const int stop = trail.level_start(level);
  int pos = static_cast<int>(trail.size()) - 1;
  if (acc_.poss(trail) >= 0) fallback = true;

  // The conflicting constraint is already stored, so learning it verbatim adds
  // nothing even when it is asserting: resolve at least once.
  while (!fallback && (out.resolutions == 0 || !asserting(acc_, trail, level))) {
    while (pos >= stop && acc_.weight(~trail[pos].lit) == 0) --pos;
    if (pos < stop || trail[pos].reason == kNoConstraint) {
      fallback = true;
      break;
    }
    const Lit l = trail[pos].lit;
    const LinearConstraint& reason = db[trail[pos].reason];
    bool ok = resolve_into(acc_, reason, l, trial_) && trial_.poss(trail) < 0;
    if (!ok) {
      // Weaken the antecedent holding the larger pivot weight and retry once.
      out.weakened = true;
      const Weight wa = acc_.weight(~l);
      const Weight wr = reason.weight_of(l.var());
      if (wa > wr) {
        ConstraintAccumulator weak;
        weak.add(weaken_to_cardinality(*acc_.to_constraint()));
        ok = resolve_into(weak, reason, l, trial_) && trial_.poss(trail) < 0;
      } else {
        ok = resolve_into(acc_, weaken_to_cardinality(reason), l, trial_) && trial_.poss(trail) < 0;
      }
      if (!ok) {
        fallback = true;
        break;
      }
    }
    acc_.copy_from(trial_);
    ++out.resolutions;
    --pos;
  }

  if (fallback) {
    out.fallback = true;
    out.learned = decision_cut(db, trail, conflict);
    if (out.learned.terms.empty()) {
      out.kind = Analysis::Kind::Unsatisfiable;
      return out;
    }
  } else {
    out.learned = *acc_.to_constraint();
  }
  out.learned.learned = true;
  out.backjump_level = assertion_level(out.learned, trail);
  return out;
}

// ---------------------------------------------------------------------------

LearnedDb::LearnedDb(Var num_vars, LearnedDbOptions options)
    : options_(options),
      activity_(2 * (static_cast<size_t>(num_vars) + 1), 0.0),
      occurrences_(2 * (static_cast<size_t>(num_vars) + 1), 0) {}

void LearnedDb::add(ConstraintId id, const LinearConstraint& c) {
  ids_.push_back(id);
  if (c.terms.size() > options_.length_bound) long_ids_.push_back(id);
  bump(c.terms);
  for (const Term& t : c.terms) ++occurrences_[t.lit.index()];
  max_size_ = std::max(max_size_, ids_.size());
}

size_t LearnedDb::reduce(ConstraintDb& db, PropagationEngine& engine, const Trail& trail) {
  size_t removed = 0;
  for (ConstraintId id : long_ids_) {
    if (!db.alive(id)) continue;
    const LinearConstraint& c = db[id];
    if (irrelevance(c, trail) <= options_.relevance_bound) continue;
    bool locked = false;
    for (const Term& t : c.terms) {
      if (trail.is_true(t.lit) && trail.reason(t.lit.var()) == id) {
        locked = true;
        break;
      }
    }
    if (locked) continue;
    engine.detach(id);
    db.remove(id);
    ++removed;
  }
  if (removed) {
    std::erase_if(long_ids_, [&](ConstraintId id) { return !db.alive(id); });
    std::erase_if(ids_, [&](ConstraintId id) { return !db.alive(id); });
    removed_since_purge_ += removed;
    if (removed_since_purge_ > 256) {
      engine.purge();
      removed_since_purge_ = 0;
    }
  }
  return removed;
}

void LearnedDb::bump(std::span<const Term> terms) {
  for (const Term& t : terms) activity_[t.lit.index()] += 1.0;
}

void LearnedDb::decay() {
  for (double& a : activity_) a *= options_.decay_factor;
}

void LearnedDb::on_conflict() {
  if (++conflicts_ % options_.decay_period == 0) decay();
}

}  // namespace pbsat
