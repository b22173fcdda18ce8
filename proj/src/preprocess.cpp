#include "pbsat/preprocess.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <unordered_map>

namespace pbsat {

namespace {

bool dominates_with(const LinearConstraint& a, const LinearConstraint& b, std::vector<Weight>& scratch) {
  for (const Term& t : b.terms) scratch[t.lit.index()] = t.weight;
  Weight slack = a.degree - b.degree;
  for (const Term& t : a.terms) {
    slack -= std::max<Weight>(0, t.weight - scratch[t.lit.index()]);
    if (slack < 0) break;
  }
  for (const Term& t : b.terms) scratch[t.lit.index()] = 0;
  return slack >= 0;
}

class Strengthener {
 public:
  Strengthener(const Instance& instance, EngineKind kind)
      : num_vars_(instance.num_vars),
        trail_(instance.num_vars),
        engine_(make_engine(kind, db_, trail_)),
        occ_(2 * static_cast<size_t>(instance.num_vars) + 2),
        stamp_(instance.constraints.size(), 0),
        scratch_(2 * static_cast<size_t>(instance.num_vars) + 2, 0) {
    std::vector<ConstraintId> ids;
    for (const LinearConstraint& c : instance.constraints) {
      if (c.is_falsum()) unsat_ = true;
      ids.push_back(store(c));
    }
    if (unsat_) return;
    for (ConstraintId id : ids) {
      if (!engine_->assert_constraint(id)) {
        unsat_ = true;
        return;
      }
    }
    if (engine_->propagate()) unsat_ = true;
  }

  bool unsat() const { return unsat_; }
  const Trail& trail() const { return trail_; }
  bool fixed(Var v) const { return trail_.is_assigned(v) && trail_.level(v) == 0; }

  // db_[id] with level-0 literals removed; nullopt if satisfied at level 0.
  std::optional<LinearConstraint> reduced(ConstraintId id) const {
    const LinearConstraint& c = db_[id];
    LinearConstraint out;
    out.degree = c.degree;
    for (const Term& t : c.terms) {
      if (fixed(t.lit.var())) {
        if (trail_.is_true(t.lit)) out.degree -= t.weight;
      } else {
        out.terms.push_back(t);
      }
    }
    if (out.degree <= 0) return std::nullopt;
    out = saturate(std::move(out));
    out.sort_terms();
    return out;
  }

  ProbeOutcome probe(std::span<const Lit> assumptions) {
    ProbeOutcome outcome;
    for (Lit l : assumptions) {
      if (trail_.is_assigned(l.var())) {
        engine_->backtrack(0);
        return outcome;
      }
      trail_.new_decision_level();
      engine_->enqueue(l, kNoConstraint);
      if (engine_->propagate()) {
        engine_->backtrack(0);
        outcome.failed = true;
        return outcome;
      }
    }
    ++epoch_;
    std::vector<ConstraintId> touched;
    for (size_t i = trail_.level_start(1); i < trail_.size(); ++i) {
      for (ConstraintId id : occ_[trail_[i].lit.index()]) {
        if (!db_.alive(id) || stamp_[id] == epoch_) continue;
        stamp_[id] = epoch_;
        touched.push_back(id);
      }
    }
    std::sort(touched.begin(), touched.end());
    for (ConstraintId id : touched) {
      auto red = reduced(id);
      if (!red) continue;
      const Weight s = curr_poss(*red, trail_).curr;
      if (s <= 0) continue;
      RawConstraint raw;
      for (const Term& t : red->terms) raw.terms.push_back({t.weight, t.lit});
      for (Lit l : assumptions) raw.terms.push_back({s, ~l});
      raw.rhs = checked_add(red->degree, s);
      NormalizeResult n = normalize(raw);
      if (n.contradiction || n.constraints.size() != 1) continue;
      outcome.replacements.push_back({static_cast<size_t>(id), db_[id], std::move(n.constraints.front())});
    }
    engine_->backtrack(0);
    return outcome;
  }

  // Asserts l permanently. False if that refutes the instance.
  bool fix(Lit l) {
    const ConstraintId id = store(make_clause({l}));
    if (!engine_->assert_constraint(id) || engine_->propagate()) unsat_ = true;
    return !unsat_;
  }

  // Applies a replacement produced by probe(). Returns false if it is stale or
  // not strictly stronger than what it replaces.
  bool apply(const Replacement& rep, StrengthenReport& report) {
    const auto id = static_cast<ConstraintId>(rep.index);
    if (!db_.alive(id)) return false;
    const auto red = reduced(id);
    if (!red) return false;
    const auto weaker = implies(*red, rep.strengthened);
    if (weaker ? *weaker : red->same_as(rep.strengthened)) return false;
    // Single-literal replacements always imply what they replace. Pair
    // replacements only do when at most one assumption can fail at a time, so
    // the others would drop models and are skipped.
    const auto stronger = implies(rep.strengthened, *red);
    if (stronger ? !*stronger : !dominates(rep.strengthened, *red)) return false;

    remove(id);
    const ConstraintId added = store(rep.strengthened);
    ++report.replacements;
    std::vector<ConstraintId> candidates;
    ++epoch_;
    for (const Term& t : db_[added].terms) {
      for (ConstraintId other : occ_[t.lit.index()]) {
        if (other == added || !db_.alive(other) || stamp_[other] == epoch_) continue;
        stamp_[other] = epoch_;
        candidates.push_back(other);
      }
    }
    for (ConstraintId other : candidates) {
      if (dominates_with(db_[added], db_[other], scratch_)) {
        remove(other);
        ++report.subsumed;
      }
    }
    if (!engine_->assert_constraint(added) || engine_->propagate()) unsat_ = true;
    return true;
  }

  Instance export_instance(const InstanceMeta& meta) const {
    Instance out;
    out.num_vars = num_vars_;
    out.meta = meta;
    if (unsat_) {
      out.add(LinearConstraint{});
      return out;
    }
    for (Var v = 1; v <= num_vars_; ++v) {
      if (fixed(v)) out.add(make_clause({trail_.is_true(Lit::positive(v)) ? Lit::positive(v) : Lit::negative(v)}));
    }
    for (ConstraintId id = 0; id < db_.capacity(); ++id) {
      if (!db_.alive(id)) continue;
      if (auto red = reduced(id)) out.add(std::move(*red));
    }
    return out;
  }

 private:
  ConstraintId store(LinearConstraint c) {
    const ConstraintId id = db_.add(std::move(c));
    engine_->attach(id);
    for (const Term& t : db_[id].terms) occ_[t.lit.index()].push_back(id);
    if (stamp_.size() <= static_cast<size_t>(id)) stamp_.resize(id + 1, 0);
    return id;
  }

  void remove(ConstraintId id) {
    engine_->detach(id);
    db_.remove(id);
  }

  Var num_vars_;
  Trail trail_;
  ConstraintDb db_;
  std::unique_ptr<PropagationEngine> engine_;
  std::vector<std::vector<ConstraintId>> occ_;  // by literal index, may hold dead ids
  std::vector<uint64_t> stamp_;
  std::vector<Weight> scratch_;
  uint64_t epoch_ = 0;
  bool unsat_ = false;
};

}  // namespace

bool dominates(const LinearConstraint& a, const LinearConstraint& b) {
  Var max_var = 0;
  for (const Term& t : a.terms) max_var = std::max(max_var, t.lit.var());
  for (const Term& t : b.terms) max_var = std::max(max_var, t.lit.var());
  std::vector<Weight> scratch(2 * static_cast<size_t>(max_var) + 2, 0);
  return dominates_with(a, b, scratch);
}

std::optional<bool> implies(const LinearConstraint& a, const LinearConstraint& b) {
  constexpr Weight kTableLimit = 1 << 16;
  if (a.degree <= 0) return b.degree <= 0;
  if (a.degree > kTableLimit) return std::nullopt;
  // Per variable: (weight in a when true, weight in a when false), same for b.
  struct Column {
    Weight a_true = 0, a_false = 0, b_true = 0, b_false = 0;
  };
  std::unordered_map<Var, Column> cols;
  for (const Term& t : a.terms) {
    Column& c = cols[t.lit.var()];
    (t.lit.is_positive() ? c.a_true : c.a_false) += t.weight;
  }
  for (const Term& t : b.terms) {
    Column& c = cols[t.lit.var()];
    (t.lit.is_positive() ? c.b_true : c.b_false) += t.weight;
  }
  // best[x] = least b-sum over partial assignments whose a-sum is min(x, degree)
  constexpr Weight kInf = std::numeric_limits<Weight>::max();
  const size_t k = static_cast<size_t>(a.degree);
  std::vector<Weight> best(k + 1, kInf), next(k + 1);
  best[0] = 0;
  for (const auto& [var, col] : cols) {
    std::fill(next.begin(), next.end(), kInf);
    for (size_t x = 0; x <= k; ++x) {
      if (best[x] == kInf) continue;
      for (bool value : {true, false}) {
        const Weight aw = value ? col.a_true : col.a_false;
        const Weight bw = value ? col.b_true : col.b_false;
        const size_t nx = std::min<size_t>(k, x + static_cast<size_t>(aw));
        next[nx] = std::min(next[nx], best[x] + bw);
      }
    }
    best.swap(next);
  }
  return best[k] == kInf || best[k] >= b.degree;
}

ProbeOutcome strengthen_probe(const Instance& instance, Lit l0, EngineKind engine) {
  if (l0.var() < 1 || l0.var() > instance.num_vars) throw std::invalid_argument("probe literal out of range");
  Strengthener s(instance, engine);
  if (s.unsat()) return ProbeOutcome{true, {}};
  if (s.fixed(l0.var())) throw std::invalid_argument("probe literal is valued at level 0");
  const Lit assumption[] = {l0};
  return s.probe(assumption);
}

Instance strengthen_pass(const Instance& instance, const StrengthenOptions& options, StrengthenReport* report) {
  StrengthenReport local;
  StrengthenReport& r = report ? *report : local;
  r = StrengthenReport{};
  Strengthener s(instance, options.engine);
  const auto start = std::chrono::steady_clock::now();
  auto out_of_budget = [&] {
    if (options.max_probes && r.probes >= options.max_probes) return true;
    if (options.time_budget_s > 0) {
      const std::chrono::duration<double> e = std::chrono::steady_clock::now() - start;
      if (e.count() >= options.time_budget_s) return true;
    }
    return false;
  };

  auto run = [&](std::span<const Lit> assumption) -> bool {
    ++r.probes;
    ProbeOutcome o = s.probe(assumption);
    if (o.failed) {
      if (assumption.size() != 1) return false;
      ++r.failed_literals;
      s.fix(~assumption[0]);
      return true;
    }
    bool changed = false;
    for (const Replacement& rep : o.replacements) {
      if (s.unsat()) break;
      changed |= s.apply(rep, r);
    }
    return changed;
  };

  const Var n = instance.num_vars;
  bool stop = s.unsat();
  while (!stop) {
    ++r.sweeps;
    bool changed = false;
    for (Var v = 1; v <= n && !stop; ++v) {
      for (Lit l : {Lit::positive(v), Lit::negative(v)}) {
        if (s.unsat() || (r.budget_exhausted = out_of_budget())) {
          stop = true;
          break;
        }
        if (s.fixed(v)) break;
        const Lit a[] = {l};
        changed |= run(a);
      }
    }
    if (!changed && options.pair_probes && !stop) {
      for (Var v = 1; v <= n && !stop; ++v) {
        for (Var u = v + 1; u <= n && !stop; ++u) {
          for (int mask = 0; mask < 4; ++mask) {
            if (s.unsat() || (r.budget_exhausted = out_of_budget())) {
              stop = true;
              break;
            }
            if (s.fixed(v) || s.fixed(u)) break;
            const Lit a[] = {Lit::make(v, mask & 1), Lit::make(u, mask & 2)};
            changed |= run(a);
          }
        }
      }
    }
    if (!changed) break;
  }
  r.unsatisfiable = s.unsat();
  return s.export_instance(instance.meta);
}

}  // namespace pbsat
