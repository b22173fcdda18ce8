#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "pbsat/model.hpp"

namespace pbsat {

enum class Value : int8_t { False = -1, Unassigned = 0, True = 1 };

// Partial assignment as an ordered stack of (literal, level, reason).
class Trail {
 public:
  struct Entry {
    Lit lit;
    int level = 0;
    ConstraintId reason = kNoConstraint;  // kNoConstraint marks a decision
  };

  Trail() = default;
  explicit Trail(Var num_vars) { resize(num_vars); }
  void resize(Var num_vars);

  Var num_vars() const { return static_cast<Var>(value_.size()) - 1; }

  Value value(Lit l) const {
    Value v = value_[l.var()];
    return l.is_positive() ? v : static_cast<Value>(-static_cast<int8_t>(v));
  }
  bool is_true(Lit l) const { return value(l) == Value::True; }
  bool is_false(Lit l) const { return value(l) == Value::False; }
  bool is_assigned(Var v) const { return value_[v] != Value::Unassigned; }

  int level(Var v) const { return level_[v]; }
  ConstraintId reason(Var v) const { return reason_[v]; }
  // Position of v on the trail; only meaningful while assigned.
  int position(Var v) const { return position_[v]; }

  int decision_level() const { return static_cast<int>(level_start_.size()); }
  void new_decision_level() { level_start_.push_back(static_cast<int>(entries_.size())); }
  // First trail index belonging to `level` (level >= 1).
  int level_start(int level) const { return level_start_[level - 1]; }

  void push(Lit l, ConstraintId reason);
  Lit pop();

  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const Entry& operator[](size_t i) const { return entries_[i]; }
  std::span<const Entry> entries() const { return entries_; }
  // Drops level bookkeeping for levels above `level`; entries must already be popped.
  void truncate_levels(int level) { level_start_.resize(level); }

 private:
  std::vector<Entry> entries_;
  std::vector<Value> value_{Value::Unassigned};
  std::vector<int> level_{0};
  std::vector<ConstraintId> reason_{kNoConstraint};
  std::vector<int> position_{0};
  std::vector<int> level_start_;
};

// Constraint storage indexed by dense ids. Deleted slots become tombstones
// whose term storage is released.
class ConstraintDb {
 public:
  ConstraintId add(LinearConstraint c);
  void remove(ConstraintId id);
  bool alive(ConstraintId id) const { return alive_[id]; }
  const LinearConstraint& operator[](ConstraintId id) const { return slots_[id]; }
  LinearConstraint& operator[](ConstraintId id) { return slots_[id]; }
  ConstraintId capacity() const { return static_cast<ConstraintId>(slots_.size()); }
  size_t live_count() const { return live_; }

 private:
  std::vector<LinearConstraint> slots_;
  std::vector<bool> alive_;
  size_t live_ = 0;
};

struct CurrPoss {
  Weight curr = 0;
  Weight poss = 0;
  bool operator==(const CurrPoss&) const = default;
};

// From-scratch evaluation of the current and possible values of c under the trail.
CurrPoss curr_poss(const LinearConstraint& c, const Trail& trail);

struct UnitCheck {
  enum class Kind { NotUnit, Unit, Conflicting };
  Kind kind = Kind::NotUnit;
  std::vector<Lit> forced;
};

UnitCheck is_unit(const LinearConstraint& c, const Trail& trail);

// sum_S w - max_S w >= degree
bool is_watching_set(const LinearConstraint& c, std::span<const Lit> watched);

enum class EngineKind { Counter, Watched };

const char* to_string(EngineKind kind);
std::optional<EngineKind> parse_engine(std::string_view name);

// Owns the propagation bookkeeping for every live constraint in a ConstraintDb
// and drives the shared Trail. Single-threaded.
class PropagationEngine {
 public:
  PropagationEngine(ConstraintDb& db, Trail& trail) : db_(db), trail_(trail) {}
  virtual ~PropagationEngine() = default;
  PropagationEngine(const PropagationEngine&) = delete;
  PropagationEngine& operator=(const PropagationEngine&) = delete;

  virtual EngineKind kind() const = 0;

  // Starts tracking a stored constraint. The trail may be non-empty; the
  // caller is responsible for acting on the constraint if it is already unit.
  virtual void attach(ConstraintId id) = 0;
  virtual void detach(ConstraintId id) = 0;
  // Drops bookkeeping entries of detached constraints.
  virtual void purge() = 0;

  // Assigns l with the given reason and updates per-constraint state.
  void enqueue(Lit l, ConstraintId reason);
  // Unit propagation to fixpoint over the unprocessed part of the trail.
  // Returns the id of a conflicting constraint, if any.
  std::optional<ConstraintId> propagate();
  // Pops the trail down to `level`.
  void backtrack(int level);

  // Forced literals are enqueued with reason id. Returns false on conflict.
  bool assert_constraint(ConstraintId id);

  uint64_t propagations() const { return propagations_; }
  size_t queue_head() const { return qhead_; }

 protected:
  virtual void on_assign(Lit l) = 0;
  virtual void on_unassign(Lit l) = 0;
  // Examines constraints affected by l becoming true; may enqueue.
  virtual std::optional<ConstraintId> process(Lit l) = 0;

  ConstraintDb& db_;
  Trail& trail_;
  size_t qhead_ = 0;
  uint64_t propagations_ = 0;
};

// curr/poss counters per constraint (s(c)/u(c) generalized to weights).
class CounterEngine final : public PropagationEngine {
 public:
  CounterEngine(ConstraintDb& db, Trail& trail);
  EngineKind kind() const override { return EngineKind::Counter; }
  void attach(ConstraintId id) override;
  void detach(ConstraintId id) override;
  void purge() override;

  CurrPoss state(ConstraintId id) const { return state_[id]; }
  // Largest weight among unvalued literals of id (0 if none).
  Weight max_unvalued_weight(ConstraintId id) const;

 protected:
  void on_assign(Lit l) override;
  void on_unassign(Lit l) override;
  std::optional<ConstraintId> process(Lit l) override;

 private:
  struct Occurrence {
    ConstraintId id;
    Weight weight;
  };
  void grow(ConstraintId id);
  std::vector<std::vector<Occurrence>> occurs_;  // by literal index
  std::vector<CurrPoss> state_;
  std::vector<bool> attached_;
};

// Watching sets per constraint; only constraints watching a falsified literal
// are examined.
class WatchedEngine final : public PropagationEngine {
 public:
  WatchedEngine(ConstraintDb& db, Trail& trail);
  EngineKind kind() const override { return EngineKind::Watched; }
  void attach(ConstraintId id) override;
  void detach(ConstraintId id) override;
  void purge() override;

  std::vector<Lit> watch_set(ConstraintId id) const;

 protected:
  void on_assign(Lit) override {}
  void on_unassign(Lit) override {}
  std::optional<ConstraintId> process(Lit l) override;

 private:
  struct WatchState {
    std::vector<uint8_t> watched;  // per term index
    std::vector<int> members;      // term indices with watched[i] == 1
    int cursor = 0;                // next term to try when all weights are equal
    bool clause = false;
  };
  enum class Examine { KeepTrigger, DropTrigger, Conflict };

  void grow(ConstraintId id);
  void watch(ConstraintId id, int term, std::optional<Lit> blocker = std::nullopt);
  // Rebuilds the watch set of id after a member became false (or at attach).
  // `trigger` is the falsified literal being processed, if any.
  Examine examine(ConstraintId id, std::optional<Lit> trigger);

  struct Watch {
    ConstraintId id;
    Lit blocker;  // clauses only: another literal of the clause
    bool has_blocker;
  };
  std::vector<std::vector<Watch>> watches_;  // by literal index
  std::vector<WatchState> state_;
  std::vector<bool> attached_;
  std::vector<int> chosen_, falsified_;  // scratch for examine()
};

std::unique_ptr<PropagationEngine> make_engine(EngineKind kind, ConstraintDb& db, Trail& trail);

}  // namespace pbsat
