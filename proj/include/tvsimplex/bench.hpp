#pragma once

#include "tvsimplex/instance.hpp"
#include "tvsimplex/simplex.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace tvsimplex {

inline constexpr char kBenchHeader[] =
    "n,n_vertices,n_edges,alpha,seed,solve_time_s,pivots,degenerate_pivots,"
    "objective";

struct BenchRecord {
  std::size_t n = 0;
  std::size_t n_vertices = 0;
  std::size_t n_edges = 0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  double solve_time_s = 0.0;
  std::size_t pivots = 0;
  std::size_t degenerate_pivots = 0;
  double objective = 0.0;
  bool timed_out = false;
};

struct BenchConfig {
  std::vector<std::size_t> sizes;
  std::vector<double> alphas;
  std::size_t reps = 1;
  std::uint64_t seed_base = 0;
  double eps = kDefaultEps;
  double delta_frac = kDefaultDeltaFraction;
  unsigned parallel = 1;
  double timeout_s = 3600.0;
  /// Writes 0 for solve_time_s so output is byte-reproducible.
  bool record_time = true;
};

inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// seed = base + 1000 rep + (FNV-1a of "N:alpha" mod 1000), alpha in %.17g.
inline std::uint64_t bench_seed(std::uint64_t base, std::size_t rep,
                                std::size_t n, double alpha) {
  const std::string key = std::to_string(n) + ":" + detail::format_number(alpha);
  return base + 1000 * static_cast<std::uint64_t>(rep) + fnv1a(key) % 1000;
}

/// Generates, calibrates and solves one instance. Only the final solve is
/// timed; the cap applies to it alone.
inline BenchRecord bench_one(std::size_t n, double alpha, std::uint64_t seed,
                             const BenchConfig &cfg) {
  Instance inst = generate_random(n, alpha, seed, cfg.eps);
  inst.delta = calibrate_delta(inst, cfg.delta_frac);
  inst.generator->delta_frac = cfg.delta_frac;

  SolveOptions opt;
  const auto start = std::chrono::steady_clock::now();
  const auto cap = std::chrono::duration<double>(cfg.timeout_s);
  opt.interrupt = [start, cap] {
    return std::chrono::steady_clock::now() - start > cap;
  };
  const SolveResult res = solve(inst, opt);

  BenchRecord r;
  r.n = n;
  r.n_vertices = inst.num_vertices();
  r.n_edges = inst.num_edges();
  r.alpha = alpha;
  r.seed = seed;
  r.solve_time_s = cfg.record_time ? res.stats.wall_time_s : 0.0;
  r.pivots = res.stats.pivots;
  r.degenerate_pivots = res.stats.degenerate_pivots;
  r.objective = res.solution.objective;
  r.timed_out = res.status == SolveStatus::Interrupted;
  return r;
}

/// Rows in (size, alpha, rep) order whatever the worker count.
inline std::vector<BenchRecord> run_bench(const BenchConfig &cfg) {
  struct Job {
    std::size_t n;
    double alpha;
    std::size_t rep;
  };
  std::vector<Job> jobs;
  for (std::size_t n : cfg.sizes)
    for (double a : cfg.alphas)
      for (std::size_t rep = 0; rep < cfg.reps; ++rep)
        jobs.push_back({n, a, rep});

  std::vector<BenchRecord> rows(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const auto &j = jobs[i];
      try {
        rows[i] = bench_one(j.n, j.alpha,
                            bench_seed(cfg.seed_base, j.rep, j.n, j.alpha), cfg);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned k = std::max(1u, cfg.parallel);
  if (k == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < k; ++t)
      pool.emplace_back(worker);
    for (auto &t : pool)
      t.join();
  }
  for (const auto &e : errors)
    if (e)
      std::rethrow_exception(e);
  return rows;
}

inline std::string csv_row(const BenchRecord &r) {
  std::string out = std::to_string(r.n) + "," + std::to_string(r.n_vertices) +
                    "," + std::to_string(r.n_edges) + "," +
                    detail::format_number(r.alpha) + "," +
                    std::to_string(r.seed) + "," +
                    detail::format_number(r.solve_time_s) + "," +
                    std::to_string(r.pivots) + "," +
                    std::to_string(r.degenerate_pivots) + ",";
  out += r.timed_out ? std::string("timeout") : detail::format_number(r.objective);
  return out;
}

inline std::string to_csv(const std::vector<BenchRecord> &rows) {
  std::string out = std::string(kBenchHeader) + "\n";
  for (const auto &r : rows)
    out += csv_row(r) + "\n";
  return out;
}

/// Mean time and pivots per (n, alpha).
inline std::string summary_table(const std::vector<BenchRecord> &rows) {
  struct Acc {
    std::size_t nv = 0, ne = 0, count = 0, timeouts = 0;
    double time = 0.0, pivots = 0.0;
  };
  std::map<std::pair<std::size_t, double>, Acc> acc;
  for (const auto &r : rows) {
    auto &a = acc[{r.n, r.alpha}];
    a.nv = r.n_vertices;
    a.ne = r.n_edges;
    ++a.count;
    a.timeouts += r.timed_out ? 1 : 0;
    a.time += r.solve_time_s;
    a.pivots += static_cast<double>(r.pivots);
  }
  std::string out = "     N      |V|      |E|  alpha   mean_time_s  mean_pivots  timeouts\n";
  char buf[160];
  for (const auto &[key, a] : acc) {
    std::snprintf(buf, sizeof buf, "%6zu %8zu %8zu %6.2f %13.4f %12.1f %9zu\n",
                  key.first, a.nv, a.ne, key.second, a.time / a.count,
                  a.pivots / a.count, a.timeouts);
    out += buf;
  }
  return out;
}

} // namespace tvsimplex
