#pragma once

// Command-line front end. Kept in a header so tests can drive it in-process.

#include "tvsimplex/bench.hpp"
#include "tvsimplex/io.hpp"
#include "tvsimplex/oracle.hpp"
#include "tvsimplex/simplex.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace tvsimplex::cli {

enum ExitCode : int {
  kOk = 0,
  kVerifyFailed = 1,
  kUsage = 2,
  kIoError = 3,
  kIterationLimit = 4,
};

struct Streams {
  std::ostream &out;
  std::ostream &err;
};

struct GenArgs {
  std::size_t grid = 0;
  double alpha = 1.0;
  std::uint64_t seed = 0;
  double eps = kDefaultEps;
  double delta_frac = kDefaultDeltaFraction;
  std::string output;
};

inline int cmd_gen(const GenArgs &a, Streams io) {
  if (a.grid == 0) {
    io.err << "gen: --grid must be at least 1\n";
    return kUsage;
  }
  if (!(a.alpha >= 0.0) || !(a.eps >= 0.0) ||
      !(a.delta_frac > 0.0 && a.delta_frac <= 1.0)) {
    io.err << "gen: need alpha >= 0, eps >= 0 and delta-frac in (0, 1]\n";
    return kUsage;
  }
  Instance inst = generate_random(a.grid, a.alpha, a.seed, a.eps);
  inst.delta = calibrate_delta(inst, a.delta_frac);
  inst.generator->delta_frac = a.delta_frac;
  try {
    write_instance(a.output, inst);
  } catch (const IoError &e) {
    io.err << "gen: " << e.what() << "\n";
    return kIoError;
  }
  return kOk;
}

struct SolveArgs {
  std::string instance;
  std::string output;
  double tol = 1e-9;
  std::optional<std::size_t> max_iters;
  std::string trace;
  std::string pricing = "dantzig";
  std::size_t degeneracy_switch = 0;
};

/// Reads an instance, mapping every failure to a message and exit code 3.
inline std::optional<Instance> load_instance(const std::string &path,
                                             const char *cmd, Streams io) {
  try {
    return read_instance(path);
  } catch (const IoError &e) {
    io.err << cmd << ": " << e.what() << "\n";
  } catch (const InstanceError &e) {
    io.err << cmd << ": invalid instance " << path << ": " << e.what() << "\n";
  } catch (const GraphError &e) {
    io.err << cmd << ": invalid graph in " << path << ": " << e.what() << "\n";
  }
  return std::nullopt;
}

inline std::optional<SolutionFile> load_solution(const std::string &path,
                                                 const char *cmd, Streams io) {
  try {
    return read_solution(path);
  } catch (const IoError &e) {
    io.err << cmd << ": " << e.what() << "\n";
  }
  return std::nullopt;
}

inline int cmd_solve(const SolveArgs &a, Streams io) {
  auto inst = load_instance(a.instance, "solve", io);
  if (!inst)
    return kIoError;
  SolveOptions opt;
  opt.tol = a.tol;
  if (a.max_iters)
    opt.max_iters = *a.max_iters;
  opt.pricing = a.pricing == "bland" ? PricingRule::Bland : PricingRule::Dantzig;
  opt.degeneracy_switch = a.degeneracy_switch;
  std::ofstream trace;
  if (!a.trace.empty()) {
    trace.open(a.trace);
    if (!trace) {
      io.err << "solve: cannot write trace " << a.trace << "\n";
      return kIoError;
    }
    opt.trace = &trace;
  }
  const SolveResult res = solve(*inst, opt);
  SolutionFile file{res.solution, to_string(res.status), to_json(res.stats),
                    res.certificate};
  const std::string text = to_json(file).dump(1) + "\n";
  if (a.output.empty()) {
    io.out << text;
  } else {
    try {
      write_text(a.output, text);
    } catch (const IoError &e) {
      io.err << "solve: " << e.what() << "\n";
      return kIoError;
    }
  }
  if (res.status != SolveStatus::Optimal) {
    io.err << "solve: stopped (" << to_string(res.status) << ") after "
           << res.stats.pivots << " pivots; wrote the current basic solution\n";
    return kIterationLimit;
  }
  return kOk;
}

struct VerifyArgs {
  std::string instance;
  std::string solution;
  double tol = 1e-9;
};

inline int cmd_verify(const VerifyArgs &a, Streams io) {
  auto inst = load_instance(a.instance, "verify", io);
  if (!inst)
    return kIoError;
  auto sol = load_solution(a.solution, "verify", io);
  if (!sol)
    return kIoError;
  const Certificate *cert = sol->certificate ? &*sol->certificate : nullptr;
  if (auto bad = verify_solution(*inst, sol->solution, a.tol, cert)) {
    io.out << to_string(bad->kind) << ": " << bad->message << "\n";
    return kVerifyFailed;
  }
  if (inst->num_vertices() <= kEnumerationCap) {
    const auto best = enumerate_optimal(*inst);
    if (std::fabs(best.best_objective - sol->solution.objective) > 1e-6) {
      io.out << to_string(SolutionViolation::Kind::OracleMismatch)
             << ": stored objective "
             << detail::format_number(sol->solution.objective)
             << " but the enumeration optimum is "
             << detail::format_number(best.best_objective) << "\n";
      return kVerifyFailed;
    }
    io.out << "ok (feasible, "
           << (cert ? "certificate rechecked, " : "no certificate, ")
           << "matches enumeration optimum "
           << detail::format_number(best.best_objective) << ")\n";
  } else {
    io.out << "ok (feasible, "
           << (cert ? "certificate rechecked" : "no certificate")
           << "; too large for enumeration)\n";
  }
  return kOk;
}

struct CountArgs {
  std::string instance;
  std::string solution;
};

inline int cmd_count_bases(const CountArgs &a, Streams io) {
  auto inst = load_instance(a.instance, "count-bases", io);
  if (!inst)
    return kIoError;
  auto sol = load_solution(a.solution, "count-bases", io);
  if (!sol)
    return kIoError;
  if (sol->solution.x.size() != inst->num_vertices()) {
    io.err << "count-bases: solution does not match the instance\n";
    return kIoError;
  }
  const auto &x = sol->solution.x;
  const BigInt det = count_bases_det(inst->graph, x);
  io.out << "determinant: " << det << "\n";
  const auto in_bounds = [&det](const BigInt &v) {
    return det <= v && v <= 2 * det ? "in-bounds" : "out-of-bounds";
  };
  try {
    const BigInt aligned = enumerate_aligned_bases(inst->graph, x);
    io.out << "enumerated: " << aligned << " (" << in_bounds(aligned) << ")\n";
    io.out << det << "/" << aligned << " " << in_bounds(aligned) << "\n";
  } catch (const OracleError &) {
    io.out << "enumerated: skipped (level edges exceed " << kAlignedEdgeCap
           << ")\n";
  }
  try {
    const BigInt feasible = count_feasible_bases(*inst, x, sol->solution.s);
    io.out << "feasible bases: " << feasible << " (" << in_bounds(feasible)
           << ")\n";
  } catch (const OracleError &) {
    io.out << "feasible bases: skipped (more than " << kColumnCap
           << " columns)\n";
  }
  return kOk;
}

struct ExportArgs {
  std::string instance;
  std::string output;
};

inline int cmd_export_lp(const ExportArgs &a, Streams io) {
  auto inst = load_instance(a.instance, "export-lp", io);
  if (!inst)
    return kIoError;
  const std::string text = export_lp(*inst);
  if (a.output.empty()) {
    io.out << text;
    return kOk;
  }
  try {
    write_text(a.output, text);
  } catch (const IoError &e) {
    io.err << "export-lp: " << e.what() << "\n";
    return kIoError;
  }
  return kOk;
}

struct BenchArgs {
  std::vector<std::size_t> sizes;
  std::vector<double> alphas;
  std::size_t reps = 1;
  std::uint64_t seed_base = 0;
  std::string csv;
  unsigned parallel = 1;
  double timeout = 3600.0;
  bool no_timing = false;
};

inline int cmd_bench(const BenchArgs &a, Streams io) {
  BenchConfig cfg;
  cfg.sizes = a.sizes;
  cfg.alphas = a.alphas;
  cfg.reps = a.reps;
  cfg.seed_base = a.seed_base;
  cfg.parallel = a.parallel;
  cfg.timeout_s = a.timeout;
  cfg.record_time = !a.no_timing;
  for (std::size_t n : cfg.sizes)
    if (n == 0) {
      io.err << "bench: sizes must be at least 1\n";
      return kUsage;
    }
  for (double al : cfg.alphas)
    if (!(al >= 0.0)) {
      io.err << "bench: alphas must be nonnegative\n";
      return kUsage;
    }
  const auto rows = run_bench(cfg);
  const std::string csv = to_csv(rows);
  if (a.csv.empty()) {
    io.out << csv;
    return kOk;
  }
  try {
    write_text(a.csv, csv);
  } catch (const IoError &e) {
    io.err << "bench: " << e.what() << "\n";
    return kIoError;
  }
  io.out << summary_table(rows);
  return kOk;
}

/// Parses argv and dispatches. Never throws; returns the exit code.
inline int run(int argc, const char *const *argv, Streams io) {
  CLI::App app{"Budget-constrained TV linear programs: forest-basis simplex "
               "solver, oracles and benchmark harness",
               "tvsimplex"};
  app.require_subcommand(1);

  GenArgs gen;
  auto *g = app.add_subcommand("gen", "generate a calibrated random grid instance");
  g->add_option("--grid", gen.grid, "grid side N")->required();
  g->add_option("--alpha", gen.alpha, "edge cost alpha")->required();
  g->add_option("--seed", gen.seed, "PRNG seed")->required();
  g->add_option("--eps", gen.eps, "cost shift eps")->capture_default_str();
  g->add_option("--delta-frac", gen.delta_frac,
                "budget as a fraction of the unconstrained usage")
      ->capture_default_str();
  g->add_option("-o,--output", gen.output, "instance file")->required();

  SolveArgs sv;
  std::size_t max_iters = 0;
  auto *s = app.add_subcommand("solve", "solve an instance file");
  s->add_option("instance", sv.instance, "instance JSON")->required();
  s->add_option("-o,--output", sv.output, "solution file (default stdout)");
  s->add_option("--tol", sv.tol, "optimality tolerance")->capture_default_str();
  auto *mi = s->add_option("--max-iters", max_iters, "pivot limit");
  s->add_option("--trace", sv.trace, "JSON-lines pivot trace file");
  s->add_option("--pricing", sv.pricing, "dantzig or bland")
      ->check(CLI::IsMember({"dantzig", "bland"}))
      ->capture_default_str();
  s->add_option("--degeneracy-switch", sv.degeneracy_switch,
                "degenerate streak before Bland's rule (0 = auto)")
      ->capture_default_str();

  VerifyArgs vf;
  auto *v = app.add_subcommand("verify", "check a solution file");
  v->add_option("instance", vf.instance, "instance JSON")->required();
  v->add_option("solution", vf.solution, "solution JSON")->required();
  v->add_option("--tol", vf.tol, "feasibility tolerance")->capture_default_str();

  CountArgs ct;
  auto *c = app.add_subcommand("count-bases",
                               "count forest bases representing a solution");
  c->add_option("instance", ct.instance, "instance JSON")->required();
  c->add_option("solution", ct.solution, "solution JSON")->required();

  ExportArgs ex;
  auto *x = app.add_subcommand("export-lp", "write the instance as an LP file");
  x->add_option("instance", ex.instance, "instance JSON")->required();
  x->add_option("-o,--output", ex.output, "LP file (default stdout)");

  BenchArgs bn;
  auto *b = app.add_subcommand("bench", "generate, calibrate and time solves");
  b->add_option("--sizes", bn.sizes, "grid sides")->required()->delimiter(',');
  b->add_option("--alphas", bn.alphas, "alpha values")->required()->delimiter(',');
  b->add_option("--reps", bn.reps, "instances per (N, alpha)")->capture_default_str();
  b->add_option("--seed-base", bn.seed_base, "seed base B")->capture_default_str();
  b->add_option("--csv", bn.csv, "CSV output file (default stdout)");
  b->add_option("--parallel", bn.parallel, "worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  b->add_option("--timeout", bn.timeout, "per-solve wall-clock cap in seconds")
      ->capture_default_str();
  b->add_flag("--no-timing", bn.no_timing,
              "write solve_time_s = 0 for byte-reproducible output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e, io.out, io.err) == 0 ? kOk : kUsage;
  }
  if (*mi)
    sv.max_iters = max_iters;

  try {
    if (*g)
      return cmd_gen(gen, io);
    if (*s)
      return cmd_solve(sv, io);
    if (*v)
      return cmd_verify(vf, io);
    if (*c)
      return cmd_count_bases(ct, io);
    if (*x)
      return cmd_export_lp(ex, io);
    if (*b)
      return cmd_bench(bn, io);
  } catch (const std::exception &e) {
    io.err << "error: " << e.what() << "\n";
    return kVerifyFailed;
  }
  return kUsage;
}

} // namespace tvsimplex::cli
