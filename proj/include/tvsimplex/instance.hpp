#pragma once

#include "tvsimplex/graph.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tvsimplex {

class InstanceError : public std::runtime_error {
public:
  enum class Kind {
    LengthMismatch,
    NonPositiveWeight,
    NegativeEdgeCostSum,
    NegativeBudget,
    NegativeAlpha,
    InfeasiblePoint,
  };

  InstanceError(Kind kind, std::int64_t index, const std::string &what)
      : std::runtime_error(what), kind_(kind), index_(index) {}

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] std::int64_t index() const { return index_; }

private:
  Kind kind_;
  std::int64_t index_;
};

/// Parameters that produced a generated instance; carried into files as meta.
struct GeneratorInfo {
  std::size_t grid = 0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  double eps = 0.0;
  double delta_frac = 0.0;
};

/// min c.x + sum_e d_fwd[e] a_fwd[e] + d_bwd[e] a_bwd[e]
/// s.t. x_tail - x_head = a_fwd - a_bwd, h.x + s = delta, x in [0,1], a, s >= 0.
struct Instance {
  Graph graph;
  std::vector<double> c;
  std::vector<double> h;
  std::vector<double> d_fwd;
  std::vector<double> d_bwd;
  double delta = 0.0;
  std::optional<GeneratorInfo> generator;

  [[nodiscard]] std::size_t num_vertices() const {
    return graph.num_vertices();
  }
  [[nodiscard]] std::size_t num_edges() const { return graph.num_edges(); }
  [[nodiscard]] double total_weight() const {
    double s = 0.0;
    for (double w : h)
      s += w;
    return s;
  }
};

struct DenseSolution {
  std::vector<double> x;
  double s = 0.0;
  double objective = 0.0;
};

/// Throws InstanceError (or GraphError) on the first violated invariant.
inline void validate(const Instance &inst) {
  validate(inst.graph);
  const auto n = inst.num_vertices();
  const auto m = inst.num_edges();
  if (inst.c.size() != n || inst.h.size() != n)
    throw InstanceError(InstanceError::Kind::LengthMismatch, -1,
                        "vertex data length does not match the graph");
  if (inst.d_fwd.size() != m || inst.d_bwd.size() != m)
    throw InstanceError(InstanceError::Kind::LengthMismatch, -1,
                        "edge data length does not match the graph");
  for (std::size_t v = 0; v < n; ++v)
    if (!(inst.h[v] > 0.0))
      throw InstanceError(InstanceError::Kind::NonPositiveWeight,
                          static_cast<std::int64_t>(v),
                          "weight h[" + std::to_string(v) +
                              "] must be positive");
  for (std::size_t e = 0; e < m; ++e)
    if (!(inst.d_fwd[e] + inst.d_bwd[e] >= 0.0))
      throw InstanceError(InstanceError::Kind::NegativeEdgeCostSum,
                          static_cast<std::int64_t>(e),
                          "d_fwd + d_bwd must be nonnegative on edge " +
                              std::to_string(e));
  if (!(inst.delta >= 0.0))
    throw InstanceError(InstanceError::Kind::NegativeBudget, -1,
                        "budget must be nonnegative");
}

/// TV-regularized instance: every edge costs alpha in both directions.
inline Instance from_tv(Graph g, std::vector<double> c, std::vector<double> h,
                        double alpha, double delta) {
  if (!(alpha >= 0.0))
    throw InstanceError(InstanceError::Kind::NegativeAlpha, -1,
                        "alpha must be nonnegative");
  const auto m = g.num_edges();
  Instance inst{std::move(g), std::move(c), std::move(h),
                std::vector<double>(m, alpha), std::vector<double>(m, alpha),
                delta, std::nullopt};
  validate(inst);
  return inst;
}

/// Standard normals for instance generation, pinned as "mt19937_64 +
/// Box-Muller v1": uniforms are the top 53 bits of std::mt19937_64 (fully
/// specified by the standard), u1 is shifted into (0,1], and each pair of
/// uniforms yields the cosine then the sine variate.
class NormalStream {
public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    constexpr double kScale = 1.0 / 9007199254740992.0; // 2^-53
    const double u1 = static_cast<double>((engine_() >> 11) + 1) * kScale;
    const double u2 = static_cast<double>(engine_() >> 11) * kScale;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline constexpr double kDefaultEps = 0.05;
inline constexpr double kDefaultDeltaFraction = 0.5;

/// Grid instance with c_v = t_v - eps, t ~ N(0,1), h = 1, d = alpha.
/// The budget is left at h(V), i.e. non-binding; see calibrate_delta.
inline Instance generate_random(std::size_t n, double alpha, std::uint64_t seed,
                                double eps = kDefaultEps) {
  Graph g = build_grid(n);
  const auto nv = g.num_vertices();
  NormalStream normals(seed);
  std::vector<double> c(nv);
  for (auto &cv : c)
    cv = normals.next() - eps;
  Instance inst = from_tv(std::move(g), std::move(c),
                          std::vector<double>(nv, 1.0), alpha,
                          static_cast<double>(nv));
  inst.generator = GeneratorInfo{n, alpha, seed, eps, 0.0};
  return inst;
}

/// c.x + sum_e d_fwd (x_t - x_h)^+ + d_bwd (x_h - x_t)^+.
inline double evaluate_objective(const Instance &inst,
                                 std::span<const double> x) {
  constexpr double kSlop = 1e-12;
  if (x.size() != inst.num_vertices())
    throw InstanceError(InstanceError::Kind::LengthMismatch, -1,
                        "point has the wrong dimension");
  double obj = 0.0;
  for (std::size_t v = 0; v < x.size(); ++v) {
    if (!(x[v] >= -kSlop && x[v] <= 1.0 + kSlop))
      throw InstanceError(InstanceError::Kind::InfeasiblePoint,
                          static_cast<std::int64_t>(v),
                          "x[" + std::to_string(v) + "] outside [0,1]");
    obj += inst.c[v] * x[v];
  }
  for (std::size_t e = 0; e < inst.num_edges(); ++e) {
    const auto [t, h] = inst.graph.edge(static_cast<EdgeId>(e));
    const double gap = x[t] - x[h];
    if (gap > 0.0)
      obj += inst.d_fwd[e] * gap;
    else if (gap < 0.0)
      obj -= inst.d_bwd[e] * gap;
  }
  return obj;
}

inline double budget_used(const Instance &inst, std::span<const double> x) {
  double used = 0.0;
  for (std::size_t v = 0; v < x.size(); ++v)
    used += inst.h[v] * x[v];
  return used;
}

namespace detail {

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void append_term(std::string &out, double coef, const std::string &var,
                        bool first) {
  if (coef < 0.0 || (coef == 0.0 && std::signbit(coef)))
    out += first ? "- " : " - ";
  else
    out += first ? "" : " + ";
  out += format_number(std::fabs(coef));
  out += ' ';
  out += var;
}

} // namespace detail

/// CPLEX-style LP text. Variables x<v> in [0,1], ap<e>, am<e> >= 0 (the
/// forward/backward parts of edge e), s >= 0. Rows: one per edge
/// ("x_t - x_h - ap + am = 0") followed by the budget row.
inline std::string export_lp(const Instance &inst) {
  const auto n = inst.num_vertices();
  const auto m = inst.num_edges();
  std::string out;
  out += "\\ budget-constrained TV linear program\n";
  out += "\\ vertices " + std::to_string(n) + " edges " + std::to_string(m) +
         "\n";
  out += "Minimize\n obj: ";
  bool first = true;
  for (std::size_t v = 0; v < n; ++v) {
    detail::append_term(out, inst.c[v], "x" + std::to_string(v), first);
    first = false;
  }
  for (std::size_t e = 0; e < m; ++e) {
    detail::append_term(out, inst.d_fwd[e], "ap" + std::to_string(e), first);
    first = false;
    detail::append_term(out, inst.d_bwd[e], "am" + std::to_string(e), false);
  }
  detail::append_term(out, 0.0, "s", first);
  out += "\nSubject To\n";
  for (std::size_t e = 0; e < m; ++e) {
    const auto [t, h] = inst.graph.edge(static_cast<EdgeId>(e));
    const auto es = std::to_string(e);
    out += " e" + es + ": x" + std::to_string(t) + " - x" + std::to_string(h) +
           " - ap" + es + " + am" + es + " = 0\n";
  }
  out += " budget: ";
  for (std::size_t v = 0; v < n; ++v)
    detail::append_term(out, inst.h[v], "x" + std::to_string(v), v == 0);
  out += n == 0 ? "s" : " + s";
  out += " = " + detail::format_number(inst.delta) + "\n";
  out += "Bounds\n";
  for (std::size_t v = 0; v < n; ++v)
    out += " 0 <= x" + std::to_string(v) + " <= 1\n";
  out += "End\n";
  return out;
}

} // namespace tvsimplex
