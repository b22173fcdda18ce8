#include "pbsat/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pbsat/bench.hpp"
#include "pbsat/io.hpp"
#include "pbsat/preprocess.hpp"
#include "pbsat/search.hpp"

namespace pbsat {

namespace {

constexpr int kExitSat = 10;
constexpr int kExitUnsat = 20;
constexpr int kExitUnknown = 0;
constexpr int kExitError = 1;

std::string read_input(const std::string& path, std::istream& in) {
  std::ostringstream buf;
  if (path == "-") {
    buf << in.rdbuf();
    return buf.str();
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  buf << f.rdbuf();
  return buf.str();
}

int exit_code(SolveStatus s) {
  switch (s) {
    case SolveStatus::Sat: return kExitSat;
    case SolveStatus::Unsat: return kExitUnsat;
    case SolveStatus::Unknown: return kExitUnknown;
  }
  return kExitError;
}

struct SolveOptions {
  std::string file;
  std::string heuristic = "activity";
  std::string engine = "watched";
  Weight relevance_bound = 3;
  size_t length_bound = 50;
  bool preprocess = false;
  uint64_t seed = 0;
  uint64_t max_decisions = 0;
  double timeout_s = 0;
  bool stats = false;
  bool portfolio = false;
};

SolverConfig make_config(const SolveOptions& o) {
  SolverConfig c;
  const auto h = parse_heuristic(o.heuristic);
  if (!h) throw std::invalid_argument("unknown heuristic '" + o.heuristic + "'");
  const auto e = parse_engine(o.engine);
  if (!e) throw std::invalid_argument("unknown engine '" + o.engine + "'");
  c.heuristic = *h;
  c.engine = *e;
  c.relevance_bound = o.relevance_bound;
  c.length_bound = o.length_bound;
  c.preprocess = o.preprocess;
  c.seed = o.seed;
  c.max_decisions = o.max_decisions;
  c.timeout_s = o.timeout_s;
  return c;
}

void print_stats(std::ostream& out, const SolveStats& s) {
  out << "c decisions=" << s.decisions << '\n'
      << "c propagations=" << s.propagations << '\n'
      << "c conflicts=" << s.conflicts << '\n'
      << "c learned=" << s.learned << '\n'
      << "c fallback_clauses=" << s.fallbacks << '\n'
      << "c deleted=" << s.deleted << '\n'
      << "c restarts=" << s.restarts << '\n'
      << "c probes=" << s.probes << '\n'
      << "c max_learned_db=" << s.max_db_size << '\n'
      << "c seconds=" << s.seconds << '\n';
}

int cmd_solve(const SolveOptions& o, std::istream& in, std::ostream& out) {
  const Instance inst = parse_instance(read_input(o.file, in));
  const SolverConfig config = make_config(o);
  const SolveResult r = o.portfolio ? solve_portfolio(inst, config) : solve(inst, config);
  if (r.status == SolveStatus::Sat && !verify(inst, r.model).ok)
    throw std::logic_error("solver returned a model that violates the input");
  out << "c decisions " << r.stats.decisions << " conflicts " << r.stats.conflicts << " learned " << r.stats.learned
      << " seconds " << r.stats.seconds << '\n';
  if (o.stats) {
    out << "c variables=" << inst.num_vars << "\nc constraints=" << inst.constraints.size() << '\n';
    print_stats(out, r.stats);
  }
  out << "s " << to_string(r.status) << '\n';
  if (r.status == SolveStatus::Sat) out << format_model(r.model);
  return exit_code(r.status);
}

struct GenOptions {
  std::string family;
  std::vector<std::string> params;
  std::string format;
  std::string graph;
  int degree = 3;
  bool even = false;
  uint64_t seed = 0;
};

int to_count(const std::string& s, const char* what) {
  size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || v < 1) throw std::invalid_argument(std::string(what) + " must be a positive integer");
  return v;
}

int cmd_gen(const GenOptions& o, std::istream& in, std::ostream& out) {
  auto need = [&](size_t n, const char* usage) {
    if (o.params.size() != n) throw std::invalid_argument(std::string("usage: gen ") + usage);
  };
  Instance inst;
  bool clausal = true;
  if (o.family == "pigeonhole-cnf") {
    need(1, "pigeonhole-cnf <holes>");
    inst = gen_pigeonhole_cnf(to_count(o.params[0], "holes"));
  } else if (o.family == "pigeonhole-pb") {
    need(1, "pigeonhole-pb <holes>");
    inst = gen_pigeonhole_pb(to_count(o.params[0], "holes"));
    clausal = false;
  } else if (o.family == "tseitin") {
    ChargedGraph g;
    if (!o.graph.empty()) {
      need(0, "tseitin --graph <file>  |  tseitin <nodes> [--degree d] [--even] [--seed s]");
      g = parse_charged_graph(read_input(o.graph, in));
    } else {
      need(1, "tseitin --graph <file>  |  tseitin <nodes> [--degree d] [--even] [--seed s]");
      g = random_regular_graph(to_count(o.params[0], "nodes"), o.degree, !o.even, o.seed);
    }
    inst = gen_tseitin(g);
  } else if (o.family == "clique-color") {
    need(2, "clique-color <m> <n>");
    inst = gen_clique_color(to_count(o.params[0], "m"), to_count(o.params[1], "n"));
  } else if (o.family == "mod-encode") {
    if (o.params.size() < 3) throw std::invalid_argument("usage: gen mod-encode <modulus> <residue> <w1> [w2 ...]");
    const Weight modulus = to_count(o.params[0], "modulus");
    const Weight residue = std::stoll(o.params[1]);
    std::vector<Term> terms;
    for (size_t i = 2; i < o.params.size(); ++i)
      terms.push_back({to_count(o.params[i], "weight"), Lit::positive(static_cast<Var>(i - 1))});
    const auto enc = gen_mod_encoding(terms, modulus, residue, static_cast<Var>(terms.size() + 1));
    inst.num_vars = enc.next_free - 1;
    inst.meta.family = "mod-encode";
    inst.meta.params["modulus"] = std::to_string(modulus);
    inst.meta.params["residue"] = std::to_string(residue);
    for (const LinearConstraint& c : enc.constraints) inst.add(c);
    clausal = false;
  } else {
    throw std::invalid_argument("unknown family '" + o.family +
                                "' (pigeonhole-cnf, pigeonhole-pb, tseitin, clique-color, mod-encode)");
  }
  std::string format = o.format.empty() ? (clausal ? "dimacs" : "opb") : o.format;
  if (format == "dimacs") {
    out << write_dimacs(inst);
  } else if (format == "opb") {
    out << write_opb(inst);
  } else {
    throw std::invalid_argument("unknown format '" + format + "' (dimacs, opb)");
  }
  return 0;
}

int cmd_verify(const std::string& file, const std::string& model_file, std::istream& in, std::ostream& out) {
  if (file == "-" && model_file == "-") throw std::invalid_argument("only one input may come from stdin");
  const Instance inst = parse_instance(read_input(file, in));
  const std::vector<bool> model = parse_model(read_input(model_file, in), inst.num_vars);
  const VerifyResult r = verify(inst, model);
  if (r.ok) {
    out << "c all " << inst.constraints.size() << " constraints hold\n";
    return 0;
  }
  out << "c constraint " << r.first_violated + 1 << " violated: " << inst.constraints[r.first_violated].to_string()
      << '\n';
  return kExitError;
}

struct BenchOptions {
  std::string suite;
  int max_n = 0;
  double timeout_s = 100;
  uint64_t max_decisions = 0;
  std::string heuristic = "activity";
  std::string engine = "watched";
  uint64_t seed = 0;
};

int cmd_bench(const BenchOptions& o, std::ostream& out) {
  SolveOptions so;
  so.heuristic = o.heuristic;
  so.engine = o.engine;
  so.timeout_s = o.timeout_s;
  so.max_decisions = o.max_decisions;
  const SolverConfig base = make_config(so);

  char line[160];
  std::snprintf(line, sizeof line, "%-24s %-14s %12s %12s %10s\n", "instance", "status", "decisions", "conflicts",
                "seconds");
  out << line;
  auto row = [&](const std::string& name, const SolveResult& r) {
    std::snprintf(line, sizeof line, "%-24s %-14s %12llu %12llu %10.2f\n", name.c_str(), to_string(r.status),
                  static_cast<unsigned long long>(r.stats.decisions),
                  static_cast<unsigned long long>(r.stats.conflicts), r.stats.seconds);
    out << line << std::flush;
  };

  if (o.suite == "pigeonhole") {
    const int max_n = o.max_n ? o.max_n : 10;
    for (int n = 2; n <= max_n; ++n) {
      const SolveResult r = solve(gen_pigeonhole_cnf(n), base);
      row("hole" + std::to_string(n) + ".cnf", r);
      if (r.status == SolveStatus::Unknown) break;
    }
    SolverConfig pb = base;
    pb.preprocess = true;
    pb.heuristic = Heuristic::Moms;
    for (int n = 2; n <= max_n; ++n) row("hole" + std::to_string(n) + ".pb+strengthen", solve(gen_pigeonhole_pb(n), pb));
  } else if (o.suite == "pigeonhole-pb") {
    const int max_n = o.max_n ? o.max_n : 50;
    SolverConfig pb = base;
    pb.preprocess = true;
    pb.heuristic = Heuristic::Moms;
    for (int n : {4, 8, 12, 20, 30, 40, 50, 75, 100}) {
      if (n > max_n) break;
      row("hole" + std::to_string(n) + ".pb+strengthen", solve(gen_pigeonhole_pb(n), pb));
    }
  } else if (o.suite == "tseitin") {
    const int max_n = o.max_n ? o.max_n : 20;
    for (int nodes = 4; nodes <= max_n; nodes += 2) {
      const ChargedGraph g = random_regular_graph(nodes, 3, true, o.seed + nodes);
      const SolveResult r = solve(gen_tseitin(g), base);
      row("tseitin-3reg-" + std::to_string(nodes), r);
      if (r.status == SolveStatus::Unknown) break;
    }
  } else if (o.suite == "clique-color") {
    const int max_n = o.max_n ? o.max_n : 4;
    for (int n = 1; n <= max_n; ++n) {
      const int m = n + 1;
      const SolveResult r = solve(gen_clique_color(m, n), base);
      row("clique-color-" + std::to_string(m) + "-" + std::to_string(n), r);
      if (r.status == SolveStatus::Unknown) break;
    }
  } else {
    throw std::invalid_argument("unknown suite '" + o.suite + "' (pigeonhole, pigeonhole-pb, tseitin, clique-color)");
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pseudo-Boolean satisfiability solver"};
  app.require_subcommand(1);

  SolveOptions so;
  auto* solve_cmd = app.add_subcommand("solve", "Solve a DIMACS CNF or OPB instance ('-' reads stdin)");
  solve_cmd->add_option("file", so.file, "Instance file")->required();
  solve_cmd->add_option("--heuristic", so.heuristic, "moms, probe, activity or recent")->capture_default_str();
  solve_cmd->add_option("--engine", so.engine, "counter or watched")->capture_default_str();
  solve_cmd->add_option("--relevance-bound", so.relevance_bound, "Delete learned constraints more irrelevant than this")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--length-bound", so.length_bound, "...and longer than this")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  solve_cmd->add_flag("--preprocess", so.preprocess, "Strengthen constraints by probing before search");
  solve_cmd->add_option("--seed", so.seed, "Random seed")->capture_default_str();
  solve_cmd->add_option("--max-decisions", so.max_decisions, "Stop after this many decisions (0: no limit)");
  solve_cmd->add_option("--timeout-s", so.timeout_s, "Wall-clock limit in seconds (0: no limit)")
      ->check(CLI::NonNegativeNumber);
  solve_cmd->add_flag("--stats", so.stats, "Print search statistics on 'c' lines");
  solve_cmd->add_flag("--portfolio", so.portfolio, "Race one thread per heuristic");

  GenOptions go;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a benchmark instance on stdout");
  gen_cmd->add_option("family", go.family, "pigeonhole-cnf, pigeonhole-pb, tseitin, clique-color, mod-encode")
      ->required();
  gen_cmd->add_option("params", go.params, "Family parameters");
  gen_cmd->add_option("--format", go.format, "dimacs or opb (default depends on the family)");
  gen_cmd->add_option("--graph", go.graph, "tseitin: charged graph file");
  gen_cmd->add_option("--degree", go.degree, "tseitin: degree of the random regular graph")->capture_default_str();
  gen_cmd->add_flag("--even", go.even, "tseitin: even total charge (satisfiable)");
  gen_cmd->add_option("--seed", go.seed, "tseitin: random seed")->capture_default_str();

  std::string verify_file, verify_model;
  auto* verify_cmd = app.add_subcommand("verify", "Check a model against an instance");
  verify_cmd->add_option("file", verify_file, "Instance file")->required();
  verify_cmd->add_option("model", verify_model, "Model file (signed integers)")->required();

  BenchOptions bo;
  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark family and print a table");
  bench_cmd->add_option("suite", bo.suite, "pigeonhole, pigeonhole-pb, tseitin, clique-color")->required();
  bench_cmd->add_option("--max-n", bo.max_n, "Largest size parameter");
  bench_cmd->add_option("--timeout-s", bo.timeout_s, "Per-instance limit in seconds")->capture_default_str();
  bench_cmd->add_option("--max-decisions", bo.max_decisions, "Per-instance decision limit (0: none)");
  bench_cmd->add_option("--heuristic", bo.heuristic, "Heuristic for the search rows")->capture_default_str();
  bench_cmd->add_option("--engine", bo.engine, "counter or watched")->capture_default_str();
  bench_cmd->add_option("--seed", bo.seed, "Seed for random graphs")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : kExitError;
  }

  try {
    if (*solve_cmd) return cmd_solve(so, in, out);
    if (*gen_cmd) return cmd_gen(go, in, out);
    if (*verify_cmd) return cmd_verify(verify_file, verify_model, in, out);
    if (*bench_cmd) return cmd_bench(bo, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace pbsat
