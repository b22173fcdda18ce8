#include "pbsat/search.hpp"

#include <algorithm>
#include <cassert>
#include <mutex>
#include <thread>

#include "pbsat/preprocess.hpp"

namespace pbsat {

const char* to_string(Heuristic h) {
  switch (h) {
    case Heuristic::Moms: return "moms";
    case Heuristic::Probe: return "probe";
    case Heuristic::Activity: return "activity";
    case Heuristic::Recent: return "recent";
  }
  return "?";
}

std::optional<Heuristic> parse_heuristic(std::string_view name) {
  for (Heuristic h : {Heuristic::Moms, Heuristic::Probe, Heuristic::Activity, Heuristic::Recent}) {
    if (name == to_string(h)) return h;
  }
  return std::nullopt;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Sat: return "SATISFIABLE";
    case SolveStatus::Unsat: return "UNSATISFIABLE";
    case SolveStatus::Unknown: return "UNKNOWN";
  }
  return "?";
}

Solver::Solver(const Instance& instance, SolverConfig config)
    : instance_(instance),
      config_(config),
      trail_(instance.num_vars),
      learned_(instance.num_vars, LearnedDbOptions{config.relevance_bound, config.length_bound,
                                                   config.activity_decay, config.decay_period}),
      analyzer_(instance.num_vars),
      rng_(config.seed) {
  if (config_.relevance_bound <= 0 || config_.length_bound == 0)
    throw std::invalid_argument("relevance and length bounds must be positive");
  engine_ = make_engine(config_.engine, db_, trail_);
  std::vector<ConstraintId> ids;
  for (const LinearConstraint& c : instance_.constraints) {
    for (const Term& t : c.terms) {
      if (t.lit.var() < 1 || t.lit.var() > instance_.num_vars)
        throw std::invalid_argument("literal outside declared variable range");
    }
    ids.push_back(db_.add(c));
    engine_->attach(ids.back());
  }
  for (ConstraintId id : ids) {
    if (!engine_->assert_constraint(id)) {
      root_ok_ = false;
      return;
    }
  }
  if (engine_->propagate()) root_ok_ = false;
}

std::optional<ConstraintId> Solver::propagate() { return engine_->propagate(); }

void Solver::decide(Lit l) {
  trail_.new_decision_level();
  engine_->enqueue(l, kNoConstraint);
  ++stats_.decisions;
  if (observer_.on_decision) observer_.on_decision(l);
}

void Solver::backtrack(int level) { engine_->backtrack(level); }

ConstraintId Solver::learn(LinearConstraint c) {
  c.learned = true;
  const ConstraintId id = db_.add(std::move(c));
  engine_->attach(id);
  learned_.add(id, db_[id]);
  ++stats_.learned;
  return id;
}

bool Solver::limits_reached() const {
  if (config_.max_decisions && stats_.decisions >= config_.max_decisions) return true;
  if (config_.max_conflicts && stats_.conflicts >= config_.max_conflicts) return true;
  if (config_.stop && config_.stop->load(std::memory_order_relaxed)) return true;
  if (config_.timeout_s > 0) {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
    if (elapsed.count() >= config_.timeout_s) return true;
  }
  return false;
}

SolveResult Solver::solve() {
  start_ = std::chrono::steady_clock::now();
  SolveResult result;
  auto finish = [&](SolveStatus status) {
    result.status = status;
    if (status == SolveStatus::Sat) {
      result.model.assign(static_cast<size_t>(instance_.num_vars) + 1, false);
      for (Var v = 1; v <= instance_.num_vars; ++v) result.model[v] = trail_.is_true(Lit::positive(v));
    }
    stats_.propagations = engine_->propagations();
    stats_.max_db_size = learned_.max_size();
    stats_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    result.stats = stats_;
    return result;
  };
  if (!root_ok_) return finish(SolveStatus::Unsat);

  double restart_limit = static_cast<double>(config_.restart_first);
  uint64_t since_restart = 0;
  std::optional<ConstraintId> pending;

  while (true) {
    std::optional<ConstraintId> conflict = pending ? pending : engine_->propagate();
    pending.reset();
    if (conflict) {
      ++stats_.conflicts;
      ++since_restart;
      learned_.on_conflict();
      const int level = trail_.decision_level();
      if (level == 0) return finish(SolveStatus::Unsat);
      Analysis a = analyzer_.analyze(db_, trail_, *conflict);
      if (a.kind == Analysis::Kind::Unsatisfiable) return finish(SolveStatus::Unsat);
      if (a.fallback) ++stats_.fallbacks;
      if (observer_.on_learned) observer_.on_learned(a.learned, trail_, a.backjump_level);
      engine_->backtrack(std::min(a.backjump_level, level - 1));
      assert(is_unit(a.learned, trail_).kind != UnitCheck::Kind::NotUnit);
      const ConstraintId id = learn(std::move(a.learned));
      if (!engine_->assert_constraint(id)) pending = id;
      if (config_.reduce_db) stats_.deleted += learned_.reduce(db_, *engine_, trail_);
      if (limits_reached()) return finish(SolveStatus::Unknown);
      continue;
    }
    if (trail_.size() == static_cast<size_t>(instance_.num_vars)) return finish(SolveStatus::Sat);
    if (limits_reached()) return finish(SolveStatus::Unknown);
    if (config_.restart_first && static_cast<double>(since_restart) >= restart_limit) {
      engine_->backtrack(0);
      ++stats_.restarts;
      since_restart = 0;
      restart_limit *= config_.restart_multiplier;
      continue;
    }
    decide(pick_branch());
  }
}

// ---------------------------------------------------------------------------
// Branching

Var Solver::lowest_unassigned() const {
  for (Var v = 1; v <= instance_.num_vars; ++v) {
    if (!trail_.is_assigned(v)) return v;
  }
  return 0;
}

Lit Solver::activity_phase(Var v) const {
  const Lit pos = Lit::positive(v);
  return learned_.learned_occurrences(pos) > learned_.learned_occurrences(~pos) ? pos : ~pos;
}

Lit Solver::pick_branch() {
  if (config_.random_branch_freq > 0.0) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng_) < config_.random_branch_freq) {
      std::vector<Var> free;
      for (Var v = 1; v <= instance_.num_vars; ++v) {
        if (!trail_.is_assigned(v)) free.push_back(v);
      }
      std::uniform_int_distribution<size_t> pick(0, free.size() - 1);
      return activity_phase(free[pick(rng_)]);
    }
  }
  switch (config_.heuristic) {
    case Heuristic::Moms: return pick_branch_moms();
    case Heuristic::Probe: return pick_branch_probe();
    case Heuristic::Activity: return pick_branch_activity();
    case Heuristic::Recent: return pick_branch_recent();
  }
  return pick_branch_activity();
}

std::vector<Solver::MomsScore> Solver::moms_ranking() const {
  size_t min_size = SIZE_MAX;
  auto residual = [&](const LinearConstraint& c) -> size_t {
    Weight curr = -c.degree;
    size_t free = 0;
    for (const Term& t : c.terms) {
      const Value v = trail_.value(t.lit);
      if (v == Value::True) curr += t.weight;
      if (v == Value::Unassigned) ++free;
    }
    return curr >= 0 ? 0 : free;
  };
  std::vector<size_t> sizes(db_.capacity(), 0);
  for (ConstraintId id = 0; id < db_.capacity(); ++id) {
    if (!db_.alive(id)) continue;
    sizes[id] = residual(db_[id]);
    if (sizes[id] > 0) min_size = std::min(min_size, sizes[id]);
  }
  std::vector<MomsScore> score(static_cast<size_t>(instance_.num_vars) + 1);
  if (min_size != SIZE_MAX) {
    for (ConstraintId id = 0; id < db_.capacity(); ++id) {
      if (!db_.alive(id) || sizes[id] != min_size) continue;
      for (const Term& t : db_[id].terms) {
        if (trail_.is_assigned(t.lit.var())) continue;
        MomsScore& s = score[t.lit.var()];
        ++s.occurrences;
        if (t.lit.is_positive()) ++s.positive;
      }
    }
  }
  std::vector<MomsScore> ranking;
  for (Var v = 1; v <= instance_.num_vars; ++v) {
    if (score[v].occurrences > 0) {
      score[v].var = v;
      ranking.push_back(score[v]);
    }
  }
  std::stable_sort(ranking.begin(), ranking.end(),
                   [](const MomsScore& a, const MomsScore& b) { return a.occurrences > b.occurrences; });
  return ranking;
}

Lit Solver::pick_branch_moms() const {
  const auto ranking = moms_ranking();
  if (ranking.empty()) return Lit::negative(lowest_unassigned());
  const MomsScore& best = ranking.front();
  const uint64_t negative = best.occurrences - best.positive;
  return Lit::make(best.var, best.positive > negative);
}

Lit Solver::pick_branch_probe() {
  const auto ranking = moms_ranking();
  if (ranking.empty()) return pick_branch_moms();
  const size_t n = std::min(ranking.size(), std::max<size_t>(config_.probe_candidates, 1));
  const int level = trail_.decision_level();

  auto probe = [&](Lit l) -> std::optional<size_t> {
    ++stats_.probes;
    const size_t before = trail_.size();
    trail_.new_decision_level();
    engine_->enqueue(l, kNoConstraint);
    const bool conflict = engine_->propagate().has_value();
    const size_t forced = trail_.size() - before - 1;
    engine_->backtrack(level);
    if (conflict) return std::nullopt;
    return forced;
  };

  std::optional<Lit> best;
  uint64_t best_product = 0, best_sum = 0;
  for (size_t i = 0; i < n; ++i) {
    const Var v = ranking[i].var;
    const auto pos = probe(Lit::positive(v));
    if (!pos) return Lit::negative(v);
    const auto neg = probe(Lit::negative(v));
    if (!neg) return Lit::positive(v);
    const uint64_t product = static_cast<uint64_t>(*pos) * *neg;
    const uint64_t sum = *pos + *neg;
    if (!best || product > best_product || (product == best_product && sum > best_sum)) {
      best = *pos > *neg ? Lit::positive(v) : Lit::negative(v);
      best_product = product;
      best_sum = sum;
    }
  }
  if (best_sum == 0) return pick_branch_moms();
  return *best;
}

Lit Solver::pick_branch_activity() const {
  Var best = 0;
  double best_score = -1.0;
  for (Var v = 1; v <= instance_.num_vars; ++v) {
    if (trail_.is_assigned(v)) continue;
    const double s = std::max(learned_.activity(Lit::positive(v)), learned_.activity(Lit::negative(v)));
    if (s > best_score) {
      best = v;
      best_score = s;
    }
  }
  return activity_phase(best);
}

Lit Solver::pick_branch_recent() const {
  const auto ids = learned_.ids();
  for (auto it = ids.rbegin(); it != ids.rend(); ++it) {
    if (!db_.alive(*it)) continue;
    const LinearConstraint& c = db_[*it];
    if (curr_poss(c, trail_).curr >= 0) continue;
    std::optional<Lit> pick;
    for (const Term& t : c.terms) {
      if (trail_.is_assigned(t.lit.var())) continue;
      if (!pick || learned_.activity(t.lit) > learned_.activity(*pick) ||
          (learned_.activity(t.lit) == learned_.activity(*pick) && t.lit.var() < pick->var())) {
        pick = t.lit;
      }
    }
    if (pick) return activity_phase(pick->var());
  }
  return pick_branch_activity();
}

// ---------------------------------------------------------------------------

SolveResult solve(const Instance& instance, const SolverConfig& config) {
  if (!config.preprocess) return Solver(instance, config).solve();
  const auto start = std::chrono::steady_clock::now();
  StrengthenOptions options;
  options.engine = config.engine;
  if (config.timeout_s > 0) options.time_budget_s = config.timeout_s;
  StrengthenReport report;
  const Instance strengthened = strengthen_pass(instance, options, &report);
  SolverConfig rest = config;
  if (config.timeout_s > 0) {
    const double used = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rest.timeout_s = std::max(1e-3, config.timeout_s - used);
  }
  SolveResult r = Solver(strengthened, rest).solve();
  r.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

SolveResult solve_portfolio(const Instance& instance, const SolverConfig& base) {
  std::atomic<bool> stop{false};
  std::mutex mu;
  std::optional<SolveResult> winner;
  std::vector<std::thread> threads;
  for (Heuristic h : {Heuristic::Activity, Heuristic::Recent, Heuristic::Moms, Heuristic::Probe}) {
    SolverConfig config = base;
    config.heuristic = h;
    config.stop = &stop;
    threads.emplace_back([&, config] {
      SolveResult r = solve(instance, config);
      std::lock_guard lock(mu);
      if (r.status != SolveStatus::Unknown && !winner) {
        winner = std::move(r);
        stop = true;
      } else if (!winner && r.status == SolveStatus::Unknown) {
        // keep the stats of some run in case nothing finishes
      }
    });
  }
  for (auto& t : threads) t.join();
  if (winner) return *winner;
  SolveResult unknown;
  unknown.status = SolveStatus::Unknown;
  return unknown;
}

}  // namespace pbsat
