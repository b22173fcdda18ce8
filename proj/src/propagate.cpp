#include "pbsat/propagate.hpp"

#include <algorithm>
#include <cassert>

namespace pbsat {

void Trail::resize(Var num_vars) {
  const size_t n = static_cast<size_t>(num_vars) + 1;
  if (n < value_.size()) throw std::invalid_argument("Trail cannot shrink");
  value_.resize(n, Value::Unassigned);
  level_.resize(n, 0);
  reason_.resize(n, kNoConstraint);
  position_.resize(n, 0);
}

void Trail::push(Lit l, ConstraintId reason) {
  const Var v = l.var();
  assert(v >= 1 && v <= num_vars());
  assert(value_[v] == Value::Unassigned);
  value_[v] = l.is_positive() ? Value::True : Value::False;
  level_[v] = decision_level();
  reason_[v] = reason;
  position_[v] = static_cast<int>(entries_.size());
  entries_.push_back({l, decision_level(), reason});
}

Lit Trail::pop() {
  assert(!entries_.empty());
  const Lit l = entries_.back().lit;
  entries_.pop_back();
  value_[l.var()] = Value::Unassigned;
  reason_[l.var()] = kNoConstraint;
  return l;
}

ConstraintId ConstraintDb::add(LinearConstraint c) {
  const auto id = static_cast<ConstraintId>(slots_.size());
  c.id = id;
  c.sort_terms();
  slots_.push_back(std::move(c));
  alive_.push_back(true);
  ++live_;
  return id;
}

void ConstraintDb::remove(ConstraintId id) {
  assert(alive_[id]);
  alive_[id] = false;
  --live_;
  std::vector<Term>().swap(slots_[id].terms);
}

CurrPoss curr_poss(const LinearConstraint& c, const Trail& trail) {
  CurrPoss r{-c.degree, -c.degree};
  for (const Term& t : c.terms) {
    const Value v = trail.value(t.lit);
    if (v == Value::True) r.curr += t.weight;
    if (v != Value::False) r.poss += t.weight;
  }
  return r;
}

UnitCheck is_unit(const LinearConstraint& c, const Trail& trail) {
  UnitCheck out;
  const Weight poss = curr_poss(c, trail).poss;
  if (poss < 0) {
    out.kind = UnitCheck::Kind::Conflicting;
    return out;
  }
  for (const Term& t : c.terms) {
    if (t.weight > poss && trail.value(t.lit) == Value::Unassigned) out.forced.push_back(t.lit);
  }
  if (!out.forced.empty()) out.kind = UnitCheck::Kind::Unit;
  return out;
}

bool is_watching_set(const LinearConstraint& c, std::span<const Lit> watched) {
  Weight sum = 0, max = 0;
  for (Lit l : watched) {
    for (const Term& t : c.terms) {
      if (t.lit == l) {
        sum += t.weight;
        max = std::max(max, t.weight);
      }
    }
  }
  return sum - max >= c.degree;
}

const char* to_string(EngineKind kind) { return kind == EngineKind::Counter ? "counter" : "watched"; }

std::optional<EngineKind> parse_engine(std::string_view name) {
  if (name == "counter") return EngineKind::Counter;
  if (name == "watched") return EngineKind::Watched;
  return std::nullopt;
}

void PropagationEngine::enqueue(Lit l, ConstraintId reason) {
  trail_.push(l, reason);
  if (reason != kNoConstraint) ++propagations_;
  on_assign(l);
}

std::optional<ConstraintId> PropagationEngine::propagate() {
  while (qhead_ < trail_.size()) {
    const Lit l = trail_[qhead_++].lit;
    if (auto conflict = process(l)) return conflict;
  }
  return std::nullopt;
}

void PropagationEngine::backtrack(int level) {
  if (trail_.decision_level() <= level) return;
  const size_t keep = static_cast<size_t>(trail_.level_start(level + 1));
  while (trail_.size() > keep) on_unassign(trail_.pop());
  trail_.truncate_levels(level);
  qhead_ = std::min(qhead_, trail_.size());
}

bool PropagationEngine::assert_constraint(ConstraintId id) {
  const UnitCheck u = is_unit(db_[id], trail_);
  if (u.kind == UnitCheck::Kind::Conflicting) return false;
  for (Lit l : u.forced) enqueue(l, id);
  return true;
}

std::unique_ptr<PropagationEngine> make_engine(EngineKind kind, ConstraintDb& db, Trail& trail) {
  if (kind == EngineKind::Counter) return std::make_unique<CounterEngine>(db, trail);
  return std::make_unique<WatchedEngine>(db, trail);
}

// ---------------------------------------------------------------------------
// Counter engine

CounterEngine::CounterEngine(ConstraintDb& db, Trail& trail)
    : PropagationEngine(db, trail), occurs_(2 * (static_cast<size_t>(trail.num_vars()) + 1)) {}

void CounterEngine::grow(ConstraintId id) {
  if (static_cast<size_t>(id) >= state_.size()) {
    state_.resize(id + 1);
    attached_.resize(id + 1, false);
  }
}

void CounterEngine::attach(ConstraintId id) {
  grow(id);
  const LinearConstraint& c = db_[id];
  state_[id] = curr_poss(c, trail_);
  attached_[id] = true;
  for (const Term& t : c.terms) occurs_[t.lit.index()].push_back({id, t.weight});
}

void CounterEngine::detach(ConstraintId id) { attached_[id] = false; }

void CounterEngine::purge() {
  for (auto& list : occurs_) {
    std::erase_if(list, [&](const Occurrence& o) { return !attached_[o.id]; });
  }
}

Weight CounterEngine::max_unvalued_weight(ConstraintId id) const {
  for (const Term& t : db_[id].terms) {
    if (trail_.value(t.lit) == Value::Unassigned) return t.weight;
  }
  return 0;
}

void CounterEngine::on_assign(Lit l) {
  for (const Occurrence& o : occurs_[l.index()]) {
    if (attached_[o.id]) state_[o.id].curr += o.weight;
  }
  for (const Occurrence& o : occurs_[(~l).index()]) {
    if (attached_[o.id]) state_[o.id].poss -= o.weight;
  }
}

void CounterEngine::on_unassign(Lit l) {
  for (const Occurrence& o : occurs_[l.index()]) {
    if (attached_[o.id]) state_[o.id].curr -= o.weight;
  }
  for (const Occurrence& o : occurs_[(~l).index()]) {
    if (attached_[o.id]) state_[o.id].poss += o.weight;
  }
}

std::optional<ConstraintId> CounterEngine::process(Lit l) {
  // Only constraints containing ~l lost possible value.
  for (const Occurrence& o : occurs_[(~l).index()]) {
    if (!attached_[o.id]) continue;
    const Weight poss = state_[o.id].poss;
    if (poss < 0) return o.id;
    const auto& terms = db_[o.id].terms;
    // Terms are sorted by descending weight, so the walk stops at the first
    // weight that cannot be forced.
    for (const Term& t : terms) {
      if (t.weight <= poss) break;
      if (trail_.value(t.lit) == Value::Unassigned) enqueue(t.lit, o.id);
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Watched engine

WatchedEngine::WatchedEngine(ConstraintDb& db, Trail& trail)
    : PropagationEngine(db, trail), watches_(2 * (static_cast<size_t>(trail.num_vars()) + 1)) {}

void WatchedEngine::grow(ConstraintId id) {
  if (static_cast<size_t>(id) >= state_.size()) {
    state_.resize(id + 1);
    attached_.resize(id + 1, false);
  }
}

void WatchedEngine::attach(ConstraintId id) {
  grow(id);
  attached_[id] = true;
  WatchState& st = state_[id];
  st.watched.assign(db_[id].terms.size(), 0);
  st.members.clear();
  st.cursor = 0;
  st.clause = db_[id].is_clause();
  examine(id, std::nullopt);
}

void WatchedEngine::detach(ConstraintId id) {
  attached_[id] = false;
  state_[id] = WatchState{};
}

void WatchedEngine::purge() {
  for (auto& list : watches_) {
    std::erase_if(list, [&](const Watch& w) { return !attached_[w.id]; });
  }
}

std::vector<Lit> WatchedEngine::watch_set(ConstraintId id) const {
  std::vector<Lit> out;
  for (int t : state_[id].members) out.push_back(db_[id].terms[t].lit);
  return out;
}

void WatchedEngine::watch(ConstraintId id, int term, std::optional<Lit> blocker) {
  WatchState& st = state_[id];
  if (st.watched[term]) return;
  st.watched[term] = 1;
  st.members.push_back(term);
  watches_[db_[id].terms[term].lit.index()].push_back({id, blocker.value_or(Lit{}), blocker.has_value()});
}

// Watch-set repair. Success: the non-false literals chosen greedily (existing
// members first, then by descending weight) satisfy sum - max >= degree, and
// become the new watch set. Failure: every non-false literal is watched, the
// old members stay, and falsified literals are added latest-first until the
// set would be a watching set once they are unassigned again; the constraint
// is then propagated from its exact possible value.
WatchedEngine::Examine WatchedEngine::examine(ConstraintId id, std::optional<Lit> trigger) {
  const LinearConstraint& c = db_[id];
  const auto& terms = c.terms;
  WatchState& st = state_[id];
  const bool attaching = !trigger.has_value();

  // Two-literal clause watch: replace the trigger by the next free literal.
  // Same outcome as the general repair below, without its bookkeeping.
  if (st.clause && trigger && st.members.size() == 2) {
    const int slot = terms[st.members[0]].lit == *trigger ? 0 : 1;
    const int other = st.members[1 - slot];
    const int n = static_cast<int>(terms.size());
    if (terms[st.members[slot]].lit == *trigger && !trail_.is_false(terms[other].lit)) {
      for (int step = 0, t = st.cursor; step < n; ++step, t = t + 1 < n ? t + 1 : 0) {
        if (st.watched[t] || trail_.is_false(terms[t].lit)) continue;
        st.watched[st.members[slot]] = 0;
        st.watched[t] = 1;
        st.members[slot] = t;
        st.cursor = t + 1 < n ? t + 1 : 0;
        watches_[terms[t].lit.index()].push_back({id, terms[other].lit, true});
        return Examine::DropTrigger;
      }
    }
  }

  std::vector<int>& chosen = chosen_;
  chosen.clear();
  Weight sum = 0, max = 0;
  auto take = [&](int t) {
    chosen.push_back(t);
    sum += terms[t].weight;
    max = std::max(max, terms[t].weight);
  };
  auto healthy = [&] { return sum - max >= c.degree; };

  for (int t : st.members) {
    if (!trail_.is_false(terms[t].lit)) take(t);
  }
  // With equal weights any order is as good as descending weight, so the scan
  // resumes where the previous one stopped instead of rescanning a prefix of
  // long-falsified literals.
  const int n = static_cast<int>(terms.size());
  const bool uniform = n > 0 && terms.front().weight == terms.back().weight;
  const int start = uniform ? st.cursor : 0;
  for (int step = 0; step < n && !healthy(); ++step) {
    const int t = start + step < n ? start + step : start + step - n;
    if (!st.watched[t] && !trail_.is_false(terms[t].lit)) {
      take(t);
      if (uniform) st.cursor = t + 1 < n ? t + 1 : 0;
    }
  }

  if (healthy()) {
    bool drop_trigger = false;
    auto& members = st.members;
    size_t kept = 0;
    for (size_t i = 0; i < members.size(); ++i) {
      const int t = members[i];
      const Lit lit = terms[t].lit;
      if (!trail_.is_false(lit)) {
        members[kept++] = t;
        continue;
      }
      st.watched[t] = 0;
      if (trigger && lit == *trigger) {
        drop_trigger = true;
      } else {
        auto& list = watches_[lit.index()];
        auto it = std::find_if(list.begin(), list.end(), [&](const Watch& w) { return w.id == id; });
        if (it != list.end()) {
          *it = list.back();
          list.pop_back();
        }
      }
    }
    members.resize(kept);
    if (st.clause && chosen.size() == 2) {
      // Either literal becoming true satisfies the clause, so each serves as
      // the other's blocker.
      watch(id, chosen[0], terms[chosen[1]].lit);
      watch(id, chosen[1], terms[chosen[0]].lit);
    } else {
      for (int t : chosen) watch(id, t);
    }
    return drop_trigger ? Examine::DropTrigger : Examine::KeepTrigger;
  }

  // Failure: chosen holds every non-false literal.
  const Weight poss = sum - c.degree;
  for (int t : chosen) watch(id, t);
  Weight wsum = 0, wmax = 0;
  for (int t : st.members) {
    wsum += terms[t].weight;
    wmax = std::max(wmax, terms[t].weight);
  }
  if (wsum - wmax < c.degree) {
    std::vector<int>& falsified = falsified_;
    falsified.clear();
    for (int t = 0; t < static_cast<int>(terms.size()); ++t) {
      if (!st.watched[t]) falsified.push_back(t);
    }
    std::sort(falsified.begin(), falsified.end(), [&](int a, int b) {
      return trail_.position(terms[a].lit.var()) > trail_.position(terms[b].lit.var());
    });
    for (int t : falsified) {
      if (wsum - wmax >= c.degree) break;
      watch(id, t);
      wsum += terms[t].weight;
      wmax = std::max(wmax, terms[t].weight);
    }
  }
  if (poss < 0) return Examine::Conflict;
  if (!attaching) {
    for (const Term& t : terms) {
      if (t.weight <= poss) break;
      if (trail_.value(t.lit) == Value::Unassigned) enqueue(t.lit, id);
    }
  }
  return Examine::KeepTrigger;
}

std::optional<ConstraintId> WatchedEngine::process(Lit l) {
  const Lit falsified = ~l;
  auto& list = watches_[falsified.index()];
  size_t i = 0, j = 0;
  std::optional<ConstraintId> conflict;
  // examine() never appends to this list: the only falsified literal it can
  // newly watch is one not yet watched, and falsified is already watched here.
  while (i < list.size()) {
    const Watch w = list[i++];
    // A true blocker means the clause is satisfied at this level or below,
    // so the falsified watch may stay until both are undone together.
    if (w.has_blocker && trail_.is_true(w.blocker)) {
      list[j++] = w;
      continue;
    }
    if (!attached_[w.id]) continue;
    const Examine r = examine(w.id, falsified);
    if (r == Examine::DropTrigger) continue;
    list[j++] = w;
    if (r == Examine::Conflict) {
      conflict = w.id;
      break;
    }
  }
  while (i < list.size()) list[j++] = list[i++];
  list.resize(j);
  return conflict;
}

}  // namespace pbsat
