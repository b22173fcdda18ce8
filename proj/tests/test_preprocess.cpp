#include "doctest.h"
#include "oracles.hpp"

#include "pbsat/bench.hpp"
#include "pbsat/preprocess.hpp"

using namespace pbsat;
using oracle::lc;
using oracle::neg;
using oracle::pos;

namespace {

const Lit a = pos(1), b = pos(2), c = pos(3), x = pos(2), y = pos(3);

Instance make(Var n, std::vector<LinearConstraint> cs) {
  Instance inst;
  inst.num_vars = n;
  inst.constraints = std::move(cs);
  return inst;
}

Instance triangle() { return make(3, {make_clause({a, b}), make_clause({a, c}), make_clause({b, c})}); }

}  // namespace

TEST_CASE("probing the triangle strengthens the third clause") {
  for (EngineKind e : {EngineKind::Counter, EngineKind::Watched}) {
    const auto out = strengthen_probe(triangle(), ~a, e);
    CHECK_FALSE(out.failed);
    REQUIRE(out.replacements.size() == 1);
    CHECK(out.replacements[0].index == 2);
    CHECK(out.replacements[0].original.same_as(make_clause({b, c})));
    CHECK(out.replacements[0].strengthened.same_as(lc({{1, a}, {1, b}, {1, c}}, 2)));
  }
}

TEST_CASE("probe without oversatisfaction changes nothing") {
  CHECK(strengthen_probe(triangle(), a).replacements.empty());
}

TEST_CASE("probe forcing both literals of a clause") {
  const Instance inst = make(3, {make_clause({~a, x}), make_clause({~a, y}), make_clause({x, y})});
  const auto out = strengthen_probe(inst, a);
  const LinearConstraint* found = nullptr;
  for (const auto& r : out.replacements)
    if (r.index == 2) found = &r.strengthened;
  REQUIRE(found);
  CHECK(found->same_as(lc({{1, ~a}, {1, x}, {1, y}}, 2)));
  CHECK(oracle::implied({*found}, inst.constraints[2], 3));
}

TEST_CASE("failed literal") {
  const Instance inst = make(2, {make_clause({~a, b}), make_clause({~a, ~b})});
  const auto out = strengthen_probe(inst, a);
  CHECK(out.failed);
  CHECK(out.replacements.empty());
  StrengthenReport rep;
  const auto pass = strengthen_pass(inst, {}, &rep);
  CHECK(rep.failed_literals >= 1);
  CHECK(oracle::models(pass.constraints, 2) == oracle::models(inst.constraints, 2));
}

TEST_CASE("probe literal must be open at level zero") {
  const Instance inst = make(2, {make_clause({a}), make_clause({a, b})});
  CHECK_THROWS_AS(strengthen_probe(inst, a), std::invalid_argument);
  CHECK_THROWS_AS(strengthen_probe(inst, pos(3)), std::invalid_argument);
}

TEST_CASE("the pass reaches a single constraint subsuming the triangle") {
  StrengthenReport rep;
  const auto out = strengthen_pass(triangle(), {}, &rep);
  REQUIRE(out.constraints.size() == 1);
  CHECK(out.constraints[0].same_as(lc({{1, a}, {1, b}, {1, c}}, 2)));
  CHECK(rep.replacements >= 1);
  CHECK(rep.subsumed >= 2);
}

TEST_CASE("empty instance passes through") {
  const auto out = strengthen_pass(make(4, {}));
  CHECK(out.num_vars == 4);
  CHECK(out.constraints.empty());
}

TEST_CASE("unsatisfiable input is detected") {
  StrengthenReport rep;
  const auto out = strengthen_pass(gen_pigeonhole_pb(3), {}, &rep);
  CHECK_FALSE(oracle::satisfiable(out));
}

TEST_CASE("replacements imply their originals") {
  oracle::Gen gen(51);
  int seen = 0;
  for (int iter = 0; iter < 1500; ++iter) {
    const Var n = gen.uniform(2, 10);
    const Instance inst = gen.coin() ? gen.instance(n, gen.uniform(1, 2 * n), 5) : gen.loose_instance(n, gen.uniform(n, 3 * n), 4);
    const Lit l0 = gen.lit_of(static_cast<Var>(gen.uniform(1, n)));
    ProbeOutcome out;
    try {
      out = strengthen_probe(inst, l0, gen.coin() ? EngineKind::Counter : EngineKind::Watched);
    } catch (const std::invalid_argument&) {
      continue;
    }
    // Replacements are built from the constraint simplified by the level-0
    // facts, so they imply the original once every literal valid in the
    // instance is added back.
    std::vector<LinearConstraint> valid;
    for (Var v = 1; v <= n; ++v)
      for (Lit l : {pos(v), neg(v)})
        if (oracle::implied(inst.constraints, make_clause({l}), n)) valid.push_back(make_clause({l}));
    for (const auto& r : out.replacements) {
      ++seen;
      auto premises = valid;
      premises.push_back(r.strengthened);
      CHECK(oracle::implied(premises, r.original, n));
      // valid in every model of the instance
      CHECK(oracle::implied(inst.constraints, r.strengthened, n));
    }
  }
  CHECK(seen > 100);
}

TEST_CASE("the pass keeps the model set and is idempotent") {
  oracle::Gen gen(52);
  for (int iter = 0; iter < 800; ++iter) {
    const Var n = gen.uniform(1, 10);
    const Instance inst = gen.instance(n, gen.uniform(1, 2 * n + 1), 5);
    StrengthenOptions opt;
    opt.engine = gen.coin() ? EngineKind::Counter : EngineKind::Watched;
    opt.pair_probes = iter % 4 == 0;
    const auto once = strengthen_pass(inst, opt);
    CHECK(once.num_vars == n);
    CHECK(oracle::models(once.constraints, n) == oracle::models(inst.constraints, n));
    const auto twice = strengthen_pass(once, opt);
    REQUIRE(twice.constraints.size() == once.constraints.size());
    for (size_t i = 0; i < once.constraints.size(); ++i) CHECK(twice.constraints[i].same_as(once.constraints[i]));
  }
}

TEST_CASE("probe budget") {
  StrengthenOptions opt;
  opt.max_probes = 3;
  StrengthenReport rep;
  const Instance inst = gen_pigeonhole_pb(6);
  const auto out = strengthen_pass(inst, opt, &rep);
  CHECK(rep.probes <= 3);
  CHECK(rep.budget_exhausted);
  CHECK(out.num_vars == inst.num_vars);
}

TEST_CASE("termwise domination and exact implication") {
  CHECK(dominates(lc({{1, a}, {1, b}, {1, c}}, 2), make_clause({a, b})));
  CHECK_FALSE(dominates(make_clause({a, b}), lc({{1, a}, {1, b}, {1, c}}, 2)));
  CHECK(dominates(lc({{2, a}, {1, b}}, 2), lc({{1, a}, {1, b}}, 1)));
  CHECK(implies(lc({{1, a}, {1, b}, {1, c}}, 2), make_clause({b, c})) == true);
  CHECK(implies(make_clause({b, c}), lc({{1, a}, {1, b}, {1, c}}, 2)) == false);
  oracle::Gen gen(53);
  for (int iter = 0; iter < 3000; ++iter) {
    const auto p = gen.constraint(6, 6);
    const auto q = gen.constraint(6, 6);
    const bool truth = oracle::implied({p}, q, 6);
    if (dominates(p, q)) CHECK(truth);
    const auto exact = implies(p, q);
    REQUIRE(exact.has_value());
    CHECK(*exact == truth);
  }
}
