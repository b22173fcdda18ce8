#pragma once

#include <optional>
#include <vector>

#include "pbsat/model.hpp"
#include "pbsat/propagate.hpp"

namespace pbsat {

struct Replacement {
  size_t index = 0;  // position of the original in instance.constraints
  LinearConstraint original;
  LinearConstraint strengthened;
};

struct ProbeOutcome {
  // The probe literal led to a conflict; its negation holds in every model.
  bool failed = false;
  std::vector<Replacement> replacements;
};

// Asserts l0 on top of the level-0 consequences of the instance, propagates,
// and strengthens every constraint that ends up oversatisfied by s > 0 into
//   s ~l0 + sum w_i l_i >= r + s.
// Throws std::invalid_argument if l0 is already valued at level 0.
ProbeOutcome strengthen_probe(const Instance& instance, Lit l0, EngineKind engine = EngineKind::Counter);

struct StrengthenOptions {
  uint64_t max_probes = 0;  // 0: unlimited
  double time_budget_s = 0.0;
  bool pair_probes = false;  // also probe two-literal assumptions
  EngineKind engine = EngineKind::Counter;
};

struct StrengthenReport {
  uint64_t probes = 0;
  uint64_t replacements = 0;
  uint64_t failed_literals = 0;
  uint64_t subsumed = 0;
  uint64_t sweeps = 0;
  bool unsatisfiable = false;
  bool budget_exhausted = false;
};

// Repeats probes on both polarities of every variable (ascending) until a
// sweep changes nothing or the budget runs out. The result has the same
// models as the input: literals fixed at level 0 appear as unit constraints
// and the remaining constraints are simplified against them.
Instance strengthen_pass(const Instance& instance, const StrengthenOptions& options = {},
                         StrengthenReport* report = nullptr);

// True if every assignment satisfying `a` satisfies `b`, judged termwise:
// degree(a) - sum over a's terms of max(0, w_a - w_b) >= degree(b).
bool dominates(const LinearConstraint& a, const LinearConstraint& b);

// Exact check that `a` implies `b` by a knapsack over the shared variables.
// std::nullopt when the degrees are too large for the table.
std::optional<bool> implies(const LinearConstraint& a, const LinearConstraint& b);

}  // namespace pbsat
