#include "pbsat/bench.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace pbsat {

Var pigeon_var(int n, int pigeon, int hole) { return static_cast<Var>((pigeon - 1) * n + hole); }

namespace {

void require_positive(int n, const char* what) {
  if (n < 1) throw std::invalid_argument(std::string(what) + " must be at least 1");
}

void add_pigeon_clauses(Instance& inst, int n) {
  for (int i = 1; i <= n + 1; ++i) {
    std::vector<Lit> lits;
    for (int j = 1; j <= n; ++j) lits.push_back(Lit::positive(pigeon_var(n, i, j)));
    inst.add(make_clause(lits));
  }
}

}  // namespace

Instance gen_pigeonhole_cnf(int n) {
  require_positive(n, "hole count");
  Instance inst;
  inst.num_vars = (n + 1) * n;
  inst.meta.family = "pigeonhole-cnf";
  inst.meta.params["n"] = std::to_string(n);
  add_pigeon_clauses(inst, n);
  for (int j = 1; j <= n; ++j) {
    for (int i = 1; i <= n + 1; ++i) {
      for (int k = i + 1; k <= n + 1; ++k) {
        inst.add(make_clause({Lit::negative(pigeon_var(n, i, j)), Lit::negative(pigeon_var(n, k, j))}));
      }
    }
  }
  return inst;
}

Instance gen_pigeonhole_pb(int n) {
  require_positive(n, "hole count");
  Instance inst;
  inst.num_vars = (n + 1) * n;
  inst.meta.family = "pigeonhole-pb";
  inst.meta.params["n"] = std::to_string(n);
  add_pigeon_clauses(inst, n);
  for (int j = 1; j <= n; ++j) {
    std::vector<Lit> lits;
    for (int i = 1; i <= n + 1; ++i) lits.push_back(Lit::negative(pigeon_var(n, i, j)));
    inst.add(make_cardinality(lits, n));
  }
  return inst;
}

std::vector<LinearConstraint> gen_parity_cnf(std::span<const Lit> lits, bool parity, size_t max_len) {
  if (lits.size() > max_len || lits.size() >= 63)
    throw std::length_error("parity constraint over " + std::to_string(lits.size()) + " literals exceeds the cap");
  std::vector<Var> vars;
  for (Lit l : lits) vars.push_back(l.var());
  std::sort(vars.begin(), vars.end());
  if (std::adjacent_find(vars.begin(), vars.end()) != vars.end())
    throw std::invalid_argument("parity constraint repeats a variable");

  std::vector<LinearConstraint> out;
  const size_t len = lits.size();
  // Each assignment with the wrong parity is excluded by the one clause it falsifies.
  // Assignments are enumerated with the first literal as the most significant bit.
  for (uint64_t a = 0; a < (uint64_t{1} << len); ++a) {
    if ((std::popcount(a) & 1) == static_cast<int>(parity)) continue;
    std::vector<Lit> clause;
    for (size_t i = 0; i < len; ++i) {
      const bool value = (a >> (len - 1 - i)) & 1;
      clause.push_back(value ? ~lits[i] : lits[i]);
    }
    out.push_back(make_clause(clause));
  }
  return out;
}

// ---------------------------------------------------------------------------

void ChargedGraph::add_edge(int u, int v) {
  edges.push_back({u, v, Lit::positive(max_var() + 1)});
}

int ChargedGraph::total_charge() const { return std::accumulate(charges.begin(), charges.end(), 0); }

Var ChargedGraph::max_var() const {
  Var m = 0;
  for (const Edge& e : edges) m = std::max(m, e.lit.var());
  return m;
}

void ChargedGraph::validate() const {
  std::vector<Var> vars;
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= num_nodes() || e.v >= num_nodes())
      throw std::invalid_argument("edge endpoint out of range");
    if (e.u == e.v) throw std::invalid_argument("self loop");
    vars.push_back(e.lit.var());
  }
  std::sort(vars.begin(), vars.end());
  if (std::adjacent_find(vars.begin(), vars.end()) != vars.end())
    throw std::invalid_argument("edge literals must be distinct");
}

Instance gen_tseitin(const ChargedGraph& g, size_t max_degree) {
  g.validate();
  Instance inst;
  inst.num_vars = g.max_var();
  inst.meta.family = "tseitin";
  inst.meta.params["nodes"] = std::to_string(g.num_nodes());
  inst.meta.params["edges"] = std::to_string(g.edges.size());
  std::vector<std::vector<Lit>> incident(g.num_nodes());
  for (const auto& e : g.edges) {
    incident[e.u].push_back(e.lit);
    incident[e.v].push_back(e.lit);
  }
  for (int node = 0; node < g.num_nodes(); ++node) {
    for (LinearConstraint& c : gen_parity_cnf(incident[node], g.charges[node] != 0, max_degree)) inst.add(std::move(c));
  }
  return inst;
}

ChargedGraph parse_charged_graph(const std::string& text) {
  ChargedGraph g;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool have_charges = false;
  auto fail = [&](const std::string& msg) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first) || first[0] == '#' || first == "c") continue;
    if (first == "charges") {
      if (have_charges) fail("duplicate charges line");
      have_charges = true;
      int bit;
      while (ls >> bit) {
        if (bit != 0 && bit != 1) fail("charge must be 0 or 1");
        g.charges.push_back(static_cast<uint8_t>(bit));
      }
      if (!ls.eof()) fail("malformed charges line");
      continue;
    }
    if (!have_charges) fail("edge before charges line");
    int u = 0, v = 0;
    try {
      u = std::stoi(first);
    } catch (const std::exception&) {
      fail("expected an edge 'u v'");
    }
    std::string rest;
    if (!(ls >> v) || (ls >> rest)) fail("expected an edge 'u v'");
    if (u < 1 || v < 1 || u > g.num_nodes() || v > g.num_nodes()) fail("edge endpoint out of range");
    if (u == v) fail("self loop");
    g.add_edge(u - 1, v - 1);
  }
  if (!have_charges) throw std::runtime_error("missing charges line");
  return g;
}

std::string write_charged_graph(const ChargedGraph& g) {
  std::ostringstream out;
  out << "charges";
  for (uint8_t c : g.charges) out << ' ' << int(c);
  out << '\n';
  for (const auto& e : g.edges) out << e.u + 1 << ' ' << e.v + 1 << '\n';
  return out.str();
}

ChargedGraph random_regular_graph(int nodes, int degree, bool odd_charge, uint64_t seed) {
  if (nodes < 1 || degree < 0 || degree >= nodes || (static_cast<int64_t>(nodes) * degree) % 2 != 0)
    throw std::invalid_argument("no simple regular graph with these parameters");
  std::mt19937_64 rng(seed);
  ChargedGraph g;
  for (int attempt = 0;; ++attempt) {
    if (attempt > 10000) throw std::runtime_error("failed to sample a regular graph");
    std::vector<int> stubs;
    for (int v = 0; v < nodes; ++v) stubs.insert(stubs.end(), degree, v);
    std::shuffle(stubs.begin(), stubs.end(), rng);
    std::vector<std::pair<int, int>> pairs;
    bool ok = true;
    for (size_t i = 0; ok && i < stubs.size(); i += 2) {
      auto [a, b] = std::minmax(stubs[i], stubs[i + 1]);
      if (a == b || std::find(pairs.begin(), pairs.end(), std::pair{a, b}) != pairs.end()) ok = false;
      pairs.emplace_back(a, b);
    }
    if (!ok) continue;
    g.edges.clear();
    for (auto [a, b] : pairs) g.add_edge(a, b);
    break;
  }
  std::bernoulli_distribution coin(0.5);
  g.charges.resize(nodes);
  for (auto& c : g.charges) c = coin(rng);
  if ((g.total_charge() % 2 == 1) != odd_charge) g.charges[0] ^= 1;
  return g;
}

// ---------------------------------------------------------------------------

Var CliqueColorVars::edge(int i, int j) const {
  // pairs (1,2),(1,3),...,(1,m),(2,3),...
  const int before = (i - 1) * m - (i - 1) * i / 2;
  return static_cast<Var>(before + (j - i));
}

Var CliqueColorVars::color(int i, int l) const { return static_cast<Var>(m * (m - 1) / 2 + (i - 1) * n + l); }

Var CliqueColorVars::embed(int k, int i) const {
  return static_cast<Var>(m * (m - 1) / 2 + m * n + (k - 1) * m + i);
}

Var CliqueColorVars::count() const { return static_cast<Var>(m * (m - 1) / 2 + m * n + (n + 1) * m); }

Instance gen_clique_color(int m, int n) {
  require_positive(m, "node count");
  require_positive(n, "color count");
  const CliqueColorVars v{m, n};
  Instance inst;
  inst.num_vars = v.count();
  inst.meta.family = "clique-color";
  inst.meta.params["m"] = std::to_string(m);
  inst.meta.params["n"] = std::to_string(n);
  auto pos = [](Var x) { return Lit::positive(x); };
  auto neg = [](Var x) { return Lit::negative(x); };
  // adjacent nodes differ in color
  for (int i = 1; i <= m; ++i)
    for (int j = i + 1; j <= m; ++j)
      for (int l = 1; l <= n; ++l) inst.add(make_clause({neg(v.edge(i, j)), neg(v.color(i, l)), neg(v.color(j, l))}));
  // every node is colored
  for (int i = 1; i <= m; ++i) {
    std::vector<Lit> lits;
    for (int l = 1; l <= n; ++l) lits.push_back(pos(v.color(i, l)));
    inst.add(make_clause(lits));
  }
  // every clique element lands somewhere
  for (int k = 1; k <= n + 1; ++k) {
    std::vector<Lit> lits;
    for (int i = 1; i <= m; ++i) lits.push_back(pos(v.embed(k, i)));
    inst.add(make_clause(lits));
  }
  // on distinct nodes
  for (int i = 1; i <= n + 1; ++i)
    for (int k = i + 1; k <= n + 1; ++k)
      for (int j = 1; j <= m; ++j) inst.add(make_clause({neg(v.embed(i, j)), neg(v.embed(k, j))}));
  // that are pairwise adjacent
  for (int i = 1; i <= m; ++i)
    for (int j = i + 1; j <= m; ++j)
      for (int k = 1; k <= n + 1; ++k)
        for (int l = 1; l <= n + 1; ++l) {
          if (k == l) continue;
          inst.add(make_clause({pos(v.edge(i, j)), neg(v.embed(k, i)), neg(v.embed(l, j))}));
        }
  return inst;
}

// ---------------------------------------------------------------------------

ModEncoding gen_mod_encoding(std::span<const Term> terms, Weight modulus, Weight residue, Var first_free) {
  if (modulus < 1) throw std::invalid_argument("modulus must be positive");
  if (residue < 0 || residue >= modulus) throw std::invalid_argument("residue must lie in [0, modulus)");
  RawConstraint eq;
  eq.relation = Relation::Equal;
  Weight total = 0;
  for (const Term& t : terms) {
    if (t.weight <= 0) throw std::invalid_argument("weights must be positive");
    if (t.lit.var() >= first_free) throw std::invalid_argument("auxiliary variables overlap the constraint");
    total = checked_add(total, t.weight);
    eq.terms.push_back({t.weight, t.lit});
  }
  ModEncoding out;
  const Weight q = total / modulus;
  Var next = first_free;
  for (Weight i = 0; i < q; ++i) {
    out.aux.push_back(next);
    eq.terms.push_back({modulus, Lit::positive(next)});
    ++next;
  }
  out.next_free = next;
  eq.rhs = checked_add(checked_mul(modulus, q), residue);
  NormalizeResult n = normalize(eq);
  if (n.contradiction) {
    out.constraints.push_back(LinearConstraint{});
  } else {
    out.constraints = std::move(n.constraints);
  }
  return out;
}

std::optional<std::vector<bool>> mod2_solve(std::span<const ParityConstraint> system, Var num_vars) {
  const size_t words = (static_cast<size_t>(num_vars) + 1 + 63) / 64;
  // Bit v (1..num_vars) of a row is the coefficient of x_v; bit 0 is the right-hand side.
  std::vector<std::vector<uint64_t>> rows;
  auto test = [](const std::vector<uint64_t>& r, size_t bit) { return (r[bit / 64] >> (bit % 64)) & 1; };
  auto flip = [](std::vector<uint64_t>& r, size_t bit) { r[bit / 64] ^= uint64_t{1} << (bit % 64); };
  for (const ParityConstraint& pc : system) {
    std::vector<uint64_t> row(words, 0);
    if (pc.parity) flip(row, 0);
    for (Lit l : pc.lits) {
      if (l.var() < 1 || l.var() > num_vars) throw std::invalid_argument("literal outside variable range");
      flip(row, l.var());
      if (l.is_negative()) flip(row, 0);  // ~x = x xor 1
    }
    rows.push_back(std::move(row));
  }
  std::vector<Var> pivot_of_row;
  size_t rank = 0;
  for (Var v = 1; v <= num_vars && rank < rows.size(); ++v) {
    size_t p = rank;
    while (p < rows.size() && !test(rows[p], v)) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[rank]);
    for (size_t r = 0; r < rows.size(); ++r) {
      if (r != rank && test(rows[r], v)) {
        for (size_t w = 0; w < words; ++w) rows[r][w] ^= rows[rank][w];
      }
    }
    pivot_of_row.push_back(v);
    ++rank;
  }
  for (size_t r = rank; r < rows.size(); ++r) {
    if (test(rows[r], 0)) return std::nullopt;  // 0 = 1
  }
  // Fully reduced: each pivot equals the rhs plus free variables, which are false.
  std::vector<bool> model(static_cast<size_t>(num_vars) + 1, false);
  for (size_t r = 0; r < rank; ++r) model[pivot_of_row[r]] = test(rows[r], 0);
  return model;
}

BruteForceResult brute_force_sat(const Instance& instance, Var cap) {
  if (instance.num_vars > cap || instance.num_vars > 62)
    throw std::length_error("brute force limited to " + std::to_string(cap) + " variables");
  const Var n = instance.num_vars;
  std::vector<bool> assignment(static_cast<size_t>(n) + 1, false);
  for (uint64_t bits = 0; bits < (uint64_t{1} << n); ++bits) {
    for (Var v = 1; v <= n; ++v) assignment[v] = (bits >> (v - 1)) & 1;
    if (instance.satisfied_by(assignment)) return {true, assignment};
  }
  return {false, {}};
}

}  // namespace pbsat
