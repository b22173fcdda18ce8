#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pbsat/infer.hpp"
#include "pbsat/model.hpp"
#include "pbsat/propagate.hpp"

namespace pbsat {

enum class Heuristic { Moms, Probe, Activity, Recent };

const char* to_string(Heuristic h);
std::optional<Heuristic> parse_heuristic(std::string_view name);

struct SolverConfig {
  Heuristic heuristic = Heuristic::Activity;
  EngineKind engine = EngineKind::Watched;
  Weight relevance_bound = 3;
  size_t length_bound = 50;
  bool reduce_db = true;  // delete irrelevant long learned constraints
  bool preprocess = false;
  uint64_t seed = 0;
  double random_branch_freq = 0.0;  // fraction of decisions on a random variable

  uint64_t restart_first = 100;  // conflicts before the first restart; 0 disables
  double restart_multiplier = 1.5;

  double activity_decay = 0.5;
  uint64_t decay_period = 64;
  size_t probe_candidates = 5;  // MOMS shortlist evaluated by the probe rule

  uint64_t max_decisions = 0;  // 0: unlimited
  uint64_t max_conflicts = 0;
  double timeout_s = 0.0;
  const std::atomic<bool>* stop = nullptr;  // external cancellation
};

enum class SolveStatus { Sat, Unsat, Unknown };

const char* to_string(SolveStatus s);

struct SolveStats {
  uint64_t decisions = 0;
  uint64_t propagations = 0;
  uint64_t conflicts = 0;
  uint64_t learned = 0;
  uint64_t fallbacks = 0;  // learned decision-cut clauses
  uint64_t deleted = 0;
  uint64_t restarts = 0;
  uint64_t probes = 0;
  size_t max_db_size = 0;
  double seconds = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Unknown;
  std::vector<bool> model;  // by variable, entry 0 unused; filled when Sat
  SolveStats stats;
};

// Hooks for inspecting the search from tests and tools.
struct SolverObserver {
  // Called right after analysis, before the rewind.
  std::function<void(const LinearConstraint& learned, const Trail& trail, int backjump_level)> on_learned;
  std::function<void(Lit)> on_decision;
};

// DPLL with conflict-driven backjumping over normalized pseudo-Boolean
// constraints.
class Solver {
 public:
  Solver(const Instance& instance, SolverConfig config);

  SolveResult solve();

  void set_observer(SolverObserver observer) { observer_ = std::move(observer); }

  // Lower-level access used by tests and the probe rule.
  const Trail& trail() const { return trail_; }
  const ConstraintDb& db() const { return db_; }
  const LearnedDb& learned_db() const { return learned_; }
  PropagationEngine& engine() { return *engine_; }
  // False if the input is refuted while loading or propagating at level 0.
  bool root_ok() const { return root_ok_; }
  // Propagates; returns a conflicting constraint id, if any.
  std::optional<ConstraintId> propagate();
  void decide(Lit l);
  void backtrack(int level);
  // Stores c as a learned constraint (bumping activities) and asserts it.
  ConstraintId learn(LinearConstraint c);

  Lit pick_branch();
  Lit pick_branch_moms() const;
  Lit pick_branch_probe();
  Lit pick_branch_activity() const;
  Lit pick_branch_recent() const;

  const SolveStats& stats() const { return stats_; }

 private:
  struct MomsScore {
    Var var = 0;
    uint64_t occurrences = 0;
    uint64_t positive = 0;
  };
  // Variables ranked by occurrences in the unsatisfied constraints of minimal
  // residual size; ties by variable index.
  std::vector<MomsScore> moms_ranking() const;
  Lit activity_phase(Var v) const;
  Var lowest_unassigned() const;
  bool limits_reached() const;

  Instance instance_;
  SolverConfig config_;
  Trail trail_;
  ConstraintDb db_;
  std::unique_ptr<PropagationEngine> engine_;
  LearnedDb learned_;
  ConflictAnalyzer analyzer_;
  SolverObserver observer_;
  SolveStats stats_;
  std::mt19937_64 rng_;
  std::chrono::steady_clock::time_point start_;
  bool root_ok_ = true;
};

// Convenience entry point: optional preprocessing, then search.
SolveResult solve(const Instance& instance, const SolverConfig& config);

// Runs one solver per heuristic on separate threads; the first definitive
// answer wins and the others are cancelled.
SolveResult solve_portfolio(const Instance& instance, const SolverConfig& base);

}  // namespace pbsat
