#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pbsat/model.hpp"

namespace pbsat {

// Pigeon i (1..n+1) in hole j (1..n) is variable (i-1)*n + j.
Var pigeon_var(int n, int pigeon, int hole);

// n+1 pigeon clauses followed by the pairwise hole exclusions, hole by hole.
Instance gen_pigeonhole_cnf(int n);
// n+1 pigeon clauses followed by one "at most one" cardinality per hole,
// written as  sum_i ~p_ij >= n.
Instance gen_pigeonhole_pb(int n);

// CNF clauses over `lits` whose models are exactly the assignments where the
// number of true literals has the given parity. Produces 2^(len-1) clauses.
// Throws std::length_error if the literal count exceeds max_len and
// std::invalid_argument on a repeated variable.
std::vector<LinearConstraint> gen_parity_cnf(std::span<const Lit> lits, bool parity, size_t max_len = 20);

// Undirected multigraph with a charge bit per node and a distinct literal per edge.
struct ChargedGraph {
  struct Edge {
    int u = 0;
    int v = 0;
    Lit lit;
  };
  std::vector<uint8_t> charges;  // node count = charges.size(); nodes are 0-based
  std::vector<Edge> edges;

  int num_nodes() const { return static_cast<int>(charges.size()); }
  // Adds an edge labelled with the next unused positive variable.
  void add_edge(int u, int v);
  int total_charge() const;
  // Throws std::invalid_argument on out-of-range endpoints, self loops or
  // repeated edge variables.
  void validate() const;
  Var max_var() const;
};

// One parity expansion per node over its incident edge literals; the result is
// unsatisfiable exactly when the total charge is odd.
Instance gen_tseitin(const ChargedGraph& g, size_t max_degree = 20);

// Text format:
//   # comment
//   charges 1 0 0
//   1 2
//   2 3
// Nodes are 1-based in the file. Throws std::runtime_error with a line number.
ChargedGraph parse_charged_graph(const std::string& text);
std::string write_charged_graph(const ChargedGraph& g);

// Random simple graph where every node has the given degree (pairing model
// with restarts); charges are random with the requested total parity.
ChargedGraph random_regular_graph(int nodes, int degree, bool odd_charge, uint64_t seed);

// Graph on m nodes with an embedded (n+1)-clique that must be n-colored.
// Variables: e_ij (i<j, lexicographic) first, then c_il at offset + (i-1)*n + l,
// then q_ki at offset + (k-1)*m + i.
Instance gen_clique_color(int m, int n);

struct CliqueColorVars {
  int m = 0, n = 0;
  Var edge(int i, int j) const;   // 1 <= i < j <= m
  Var color(int i, int l) const;  // node i has color l
  Var embed(int k, int i) const;  // clique element k sits on node i
  Var count() const;
};

struct ModEncoding {
  std::vector<LinearConstraint> constraints;
  std::vector<Var> aux;
  Var next_free = 0;
};

// sum w_i l_i == residue (mod modulus) as the equality
//   sum w_i l_i + modulus * (s_1 + ... + s_q) = modulus * q + residue,
// q = floor(sum w_i / modulus), split into two normal-form constraints.
// Auxiliary variables are numbered from first_free.
ModEncoding gen_mod_encoding(std::span<const Term> terms, Weight modulus, Weight residue, Var first_free);

struct ParityConstraint {
  std::vector<Lit> lits;
  bool parity = false;  // xor of the literals
};

// Gaussian elimination over GF(2). Returns a model indexed by variable (entry 0
// unused, free variables false) or std::nullopt if the system is inconsistent.
std::optional<std::vector<bool>> mod2_solve(std::span<const ParityConstraint> system, Var num_vars);

struct BruteForceResult {
  bool sat = false;
  std::vector<bool> witness;  // by variable, entry 0 unused
};

// Exhaustive enumeration. Throws std::length_error above `cap` variables.
BruteForceResult brute_force_sat(const Instance& instance, Var cap = 20);

}  // namespace pbsat
