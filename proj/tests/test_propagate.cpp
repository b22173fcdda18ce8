#include "doctest.h"
#include "oracles.hpp"

#include "pbsat/propagate.hpp"

using namespace pbsat;
using oracle::lc;
using oracle::neg;
using oracle::pos;

namespace {

// a..e
const Lit a = pos(1), b = pos(2), c = pos(3), d = pos(4), e = pos(5);

Instance make(Var n, std::vector<LinearConstraint> cs) {
  Instance inst;
  inst.num_vars = n;
  inst.constraints = std::move(cs);
  return inst;
}

}  // namespace

TEST_CASE("curr and poss from scratch") {
  const auto c31 = lc({{2, e}, {1, a}, {1, c}}, 2);
  auto t = oracle::trail_of({~a, ~b, c, d}, 5);
  CHECK(curr_poss(c31, t) == CurrPoss{-1, 1});

  auto empty = oracle::trail_of({}, 5);
  CHECK(curr_poss(c31, empty) == CurrPoss{-2, 2});

  const auto card = lc({{1, a}, {1, b}, {1, c}}, 2);
  CHECK(curr_poss(card, oracle::trail_of({a, b}, 5)) == CurrPoss{0, 1});
}

TEST_CASE("unit detection examples") {
  auto u = is_unit(lc({{2, e}, {1, a}, {1, c}}, 2), oracle::trail_of({~a, ~b, c, d}, 5));
  REQUIRE(u.kind == UnitCheck::Kind::Unit);
  CHECK(u.forced == std::vector<Lit>{e});

  auto v = is_unit(make_clause({a, b}), oracle::trail_of({~a}, 5));
  REQUIRE(v.kind == UnitCheck::Kind::Unit);
  CHECK(v.forced == std::vector<Lit>{b});

  auto w = is_unit(lc({{2, a}, {1, b}, {1, c}}, 2), oracle::trail_of({~b}, 5));
  REQUIRE(w.kind == UnitCheck::Kind::Unit);
  CHECK(w.forced == std::vector<Lit>{a});

  auto x = is_unit(make_clause({a, b}), oracle::trail_of({~a, ~b}, 5));
  CHECK(x.kind == UnitCheck::Kind::Conflicting);
}

TEST_CASE("several literals forced by one constraint") {
  // 2a + 2b + c >= 4 under nothing: poss = 1, a and b forced
  auto u = is_unit(lc({{2, a}, {2, b}, {1, c}}, 4), oracle::trail_of({}, 5));
  REQUIRE(u.kind == UnitCheck::Kind::Unit);
  CHECK(u.forced.size() == 2);
}

TEST_CASE("watching set examples") {
  const auto card = lc({{1, a}, {1, b}, {1, c}}, 2);
  CHECK(is_watching_set(card, std::vector<Lit>{a, b, c}));
  CHECK_FALSE(is_watching_set(card, std::vector<Lit>{a, b}));
  CHECK_FALSE(is_watching_set(card, std::vector<Lit>{a, c}));
  CHECK_FALSE(is_watching_set(card, std::vector<Lit>{b, c}));
  CHECK(is_watching_set(make_clause({a, b}), std::vector<Lit>{a, b}));
  const auto pb = lc({{2, a}, {1, b}, {1, c}}, 2);
  CHECK(is_watching_set(pb, std::vector<Lit>{a, b, c}));
  CHECK_FALSE(is_watching_set(pb, std::vector<Lit>{b, c}));
}

TEST_CASE("poss >= 0 exactly when the partial assignment extends to a model") {
  oracle::Gen gen(21);
  for (int iter = 0; iter < 3000; ++iter) {
    const Var n = gen.uniform(1, 10);
    const auto con = gen.constraint(n, 7);
    std::vector<Lit> lits;
    for (Var v : gen.distinct_vars(n, gen.uniform(0, n))) lits.push_back(gen.lit_of(v));
    const auto t = oracle::trail_of(lits, n);
    CHECK((curr_poss(con, t).poss >= 0) == oracle::completable(con, oracle::partial_of(lits, n)));
  }
}

TEST_CASE("is_unit matches the enumeration definition of forcing") {
  oracle::Gen gen(22);
  for (int iter = 0; iter < 3000; ++iter) {
    const Var n = gen.uniform(1, 10);
    const auto con = gen.constraint(n, 7);
    std::vector<Lit> lits;
    for (Var v : gen.distinct_vars(n, gen.uniform(0, n))) lits.push_back(gen.lit_of(v));
    const auto partial = oracle::partial_of(lits, n);
    const auto u = is_unit(con, oracle::trail_of(lits, n));
    if (!oracle::completable(con, partial)) {
      CHECK(u.kind == UnitCheck::Kind::Conflicting);
      continue;
    }
    auto expected = oracle::forced_by_enumeration(con, partial);
    auto got = u.forced;
    std::sort(expected.begin(), expected.end());
    std::sort(got.begin(), got.end());
    CHECK(got == expected);
    CHECK((u.kind == UnitCheck::Kind::Unit) == !expected.empty());
  }
}

TEST_CASE("watching-set criterion matches the definition on every subset") {
  oracle::Gen gen(23);
  int checked = 0;
  for (int iter = 0; iter < 300; ++iter) {
    const auto con = gen.constraint(6, 6);
    const size_t len = con.terms.size();
    for (uint32_t mask = 0; mask < (1u << len); ++mask) {
      std::vector<Lit> s;
      for (size_t i = 0; i < len; ++i)
        if (mask >> i & 1) s.push_back(con.terms[i].lit);
      CHECK(is_watching_set(con, s) == oracle::watching_by_definition(con, s));
      ++checked;
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("propagation examples on both engines") {
  for (EngineKind kind : {EngineKind::Counter, EngineKind::Watched}) {
    CAPTURE(to_string(kind));
    {
      oracle::Harness h(make(2, {make_clause({a, b}), make_clause({~a})}), kind);
      CHECK_FALSE(h.root_conflict);
      CHECK(h.trail.is_false(a));
      CHECK(h.trail.is_true(b));
    }
    {
      oracle::Harness h(make(5, {lc({{2, e}, {1, a}, {1, c}}, 2), lc({{2, ~e}, {1, b}, {1, d}}, 2)}), kind);
      REQUIRE_FALSE(h.root_conflict);
      for (Lit l : {~a, ~b, c, d}) h.decide(l);
      CHECK(h.engine->propagate().has_value());
    }
    {
      oracle::Harness h(make(3, {make_clause({a, b}), make_clause({a, c}), make_clause({b, c})}), kind);
      h.decide(~a);
      CHECK_FALSE(h.engine->propagate().has_value());
      CHECK(h.trail.is_true(b));
      CHECK(h.trail.is_true(c));
      CHECK(h.trail.reason(b.var()) == 0);
      CHECK(h.trail.reason(c.var()) == 1);
    }
  }
}

TEST_CASE("watched clause moves its watch to an unvalued literal") {
  oracle::Harness h(make(3, {make_clause({a, b, c})}), EngineKind::Watched);
  auto& eng = static_cast<WatchedEngine&>(*h.engine);
  const auto before = eng.watch_set(0);
  REQUIRE(before.size() == 2);
  const Lit gone = before[0];
  h.decide(~gone);
  CHECK_FALSE(h.engine->propagate().has_value());
  const auto after = eng.watch_set(0);
  CHECK(after.size() == 2);
  CHECK(std::find(after.begin(), after.end(), gone) == after.end());
  CHECK(is_watching_set(h.db[0], after));
}

TEST_CASE("clauses are watched by exactly two literals") {
  oracle::Gen gen(24);
  for (int iter = 0; iter < 200; ++iter) {
    Instance inst;
    inst.num_vars = 8;
    for (int i = 0; i < 10; ++i) {
      std::vector<Lit> lits;
      for (Var v : gen.distinct_vars(8, gen.uniform(2, 5))) lits.push_back(gen.lit_of(v));
      inst.constraints.push_back(make_clause(lits));
    }
    oracle::Harness h(inst, EngineKind::Watched);
    auto& eng = static_cast<WatchedEngine&>(*h.engine);
    for (ConstraintId id = 0; id < h.db.capacity(); ++id) CHECK(eng.watch_set(id).size() == 2);
  }
}

TEST_CASE("cardinality constraints are watched by k+1 literals") {
  LinearConstraint card;
  for (Var v = 1; v <= 6; ++v) card.terms.push_back({1, pos(v)});
  card.degree = 3;
  oracle::Harness h(make(6, {card}), EngineKind::Watched);
  CHECK(static_cast<WatchedEngine&>(*h.engine).watch_set(0).size() == 4);
}

TEST_CASE("unrelated assignment leaves counters untouched") {
  oracle::Harness h(make(4, {make_clause({a, b})}), EngineKind::Counter);
  auto& eng = static_cast<CounterEngine&>(*h.engine);
  const auto before = eng.state(0);
  h.decide(d);
  CHECK(eng.state(0) == before);
}

TEST_CASE("incremental counters equal from-scratch values through assignments and backtracks") {
  oracle::Gen gen(25);
  long steps = 0;
  for (int iter = 0; iter < 300; ++iter) {
    const Var n = gen.uniform(2, 10);
    oracle::Harness h(gen.loose_instance(n, gen.uniform(1, 3 * n), 5), EngineKind::Counter);
    if (h.root_conflict) continue;
    auto& eng = static_cast<CounterEngine&>(*h.engine);
    for (int step = 0; step < 60; ++step) {
      std::vector<Var> free;
      for (Var v = 1; v <= n; ++v)
        if (!h.trail.is_assigned(v)) free.push_back(v);
      if (free.empty() || gen.uniform(0, 4) == 0) {
        h.engine->backtrack(gen.uniform(0, h.trail.decision_level()));
      } else {
        h.decide(gen.lit_of(free[gen.uniform(0, static_cast<int>(free.size()) - 1)]));
        if (gen.coin() && h.engine->propagate()) h.engine->backtrack(h.trail.decision_level() - 1);
      }
      for (ConstraintId id = 0; id < h.db.capacity(); ++id) {
        CHECK(eng.state(id) == curr_poss(h.db[id], h.trail));
        Weight max_free = 0;
        for (const Term& t : h.db[id].terms)
          if (h.trail.value(t.lit) == Value::Unassigned) max_free = std::max(max_free, t.weight);
        CHECK(eng.max_unvalued_weight(id) == max_free);
      }
      ++steps;
    }
  }
  CHECK(steps > 10000);
}

TEST_CASE("counter and watched engines reach the same fixpoint") {
  oracle::Gen gen(26);
  for (int iter = 0; iter < 1000; ++iter) {
    const Var n = gen.uniform(2, 12);
    const Instance inst = gen.loose_instance(n, gen.uniform(1, 3 * n), 5);
    oracle::Harness hc(inst, EngineKind::Counter);
    oracle::Harness hw(inst, EngineKind::Watched);
    REQUIRE(hc.root_conflict == hw.root_conflict);
    if (hc.root_conflict) continue;
    CHECK(hc.assigned() == hw.assigned());
    for (int round = 0; round < 8; ++round) {
      std::vector<Var> free;
      for (Var v = 1; v <= n; ++v)
        if (!hc.trail.is_assigned(v)) free.push_back(v);
      if (free.empty()) break;
      const Lit l = gen.lit_of(free[gen.uniform(0, static_cast<int>(free.size()) - 1)]);
      hc.decide(l);
      hw.decide(l);
      const bool cc = hc.engine->propagate().has_value();
      const bool cw = hw.engine->propagate().has_value();
      REQUIRE(cc == cw);
      if (cc) {
        const int back = gen.uniform(0, hc.trail.decision_level() - 1);
        hc.engine->backtrack(back);
        hw.engine->backtrack(back);
      }
      CHECK(hc.assigned() == hw.assigned());
      for (const auto& entry : hw.trail.entries()) {
        if (entry.reason == kNoConstraint) continue;
        // every propagated literal is justified by its reason
        CHECK(hw.db[entry.reason].weight_of(entry.lit.var()) > 0);
      }
    }
  }
}

TEST_CASE("constraint store tombstones") {
  ConstraintDb db;
  const auto x = db.add(make_clause({a, b}));
  const auto y = db.add(make_clause({c}));
  db.remove(x);
  CHECK_FALSE(db.alive(x));
  CHECK(db.alive(y));
  CHECK(db.live_count() == 1);
  CHECK(db.add(make_clause({d})) == 2);
}
