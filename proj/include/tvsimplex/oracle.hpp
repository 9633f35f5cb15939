#pragma once

#include "tvsimplex/forest.hpp"
#include "tvsimplex/instance.hpp"
#include "tvsimplex/simplex.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tvsimplex {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

class OracleError : public std::runtime_error {
public:
  enum class Kind { TooLarge };

  OracleError(Kind kind, std::size_t size, const std::string &what)
      : std::runtime_error(what), kind_(kind), size_(size) {}

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] std::size_t size() const { return size_; }

private:
  Kind kind_;
  std::size_t size_;
};

struct EnumerationResult {
  std::vector<double> best_x;
  double best_objective = 0.0;
  std::size_t n_candidates = 0;
};

inline constexpr std::size_t kEnumerationCap = 14;
inline constexpr std::size_t kAlignedEdgeCap = 12;

namespace detail {

inline std::vector<std::uint32_t> neighbor_masks(const Graph &g) {
  std::vector<std::uint32_t> nb(g.num_vertices(), 0);
  for (const auto &[t, h] : g.edges()) {
    nb[t] |= 1u << h;
    nb[h] |= 1u << t;
  }
  return nb;
}

inline bool connected_mask(std::uint32_t set,
                           const std::vector<std::uint32_t> &nb) {
  if (set == 0)
    return false;
  std::uint32_t reached = set & (~set + 1);
  for (;;) {
    std::uint32_t grow = reached;
    for (std::uint32_t r = reached; r; r &= r - 1)
      grow |= nb[std::countr_zero(r)] & set;
    if (grow == reached)
      break;
    reached = grow;
  }
  return reached == set;
}

} // namespace detail

/// Minimizes over every candidate vertex of the feasible region: all binary
/// points within budget, and for each connected set S and binary assignment
/// outside it, x = theta on S with the budget tight, theta in (0,1).
inline EnumerationResult enumerate_optimal(const Instance &inst,
                                           std::size_t cap = kEnumerationCap) {
  const std::size_t n = inst.num_vertices();
  if (n > cap || n > 30)
    throw OracleError(OracleError::Kind::TooLarge, n,
                      "enumerate_optimal: " + std::to_string(n) +
                          " vertices exceed the cap of " + std::to_string(cap));
  const auto nb = detail::neighbor_masks(inst.graph);
  const std::uint32_t full = n == 0 ? 0u : (n == 32 ? ~0u : (1u << n) - 1u);
  constexpr double kBudgetSlop = 1e-12;

  EnumerationResult best;
  best.best_objective = std::numeric_limits<double>::infinity();
  std::vector<double> x(n, 0.0);
  const auto consider = [&] {
    ++best.n_candidates;
    const double obj = evaluate_objective(inst, x);
    if (obj < best.best_objective) {
      best.best_objective = obj;
      best.best_x = x;
    }
  };

  // Binary points.
  for (std::uint64_t ones = 0; ones <= full; ++ones) {
    double used = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      x[v] = (ones >> v) & 1u ? 1.0 : 0.0;
      used += inst.h[v] * x[v];
    }
    if (used <= inst.delta + kBudgetSlop)
      consider();
  }

  // One fractional connected set with the budget tight.
  for (std::uint32_t set = 1; set <= full && set != 0; ++set) {
    if (!detail::connected_mask(set, nb))
      continue;
    double hs = 0.0;
    for (std::uint32_t r = set; r; r &= r - 1)
      hs += inst.h[std::countr_zero(r)];
    const std::uint32_t rest = full & ~set;
    // Enumerate subsets of the complement.
    for (std::uint32_t ones = rest;; ones = (ones - 1) & rest) {
      double outside = 0.0;
      for (std::uint32_t r = ones; r; r &= r - 1)
        outside += inst.h[std::countr_zero(r)];
      const double theta = (inst.delta - outside) / hs;
      if (theta > 0.0 && theta < 1.0) {
        for (std::size_t v = 0; v < n; ++v)
          x[v] = (set >> v) & 1u ? theta : ((ones >> v) & 1u ? 1.0 : 0.0);
        consider();
      }
      if (ones == 0)
        break;
    }
  }
  return best;
}

namespace detail {

/// Edges of G_x: both endpoints carry the same value.
inline std::vector<EdgeId> level_edges(const Graph &g, std::span<const double> x,
                                       double tol) {
  std::vector<EdgeId> out;
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const auto [t, h] = g.edge(static_cast<EdgeId>(e));
    if (std::fabs(x[t] - x[h]) <= tol)
      out.push_back(static_cast<EdgeId>(e));
  }
  return out;
}

/// |det| of an integer matrix by fraction-free elimination.
inline BigInt bareiss_abs_det(std::vector<std::vector<BigInt>> a) {
  const std::size_t k = a.size();
  if (k == 0)
    return 1;
  BigInt prev = 1;
  int sign = 1;
  for (std::size_t i = 0; i < k; ++i) {
    if (a[i][i] == 0) {
      std::size_t p = i + 1;
      while (p < k && a[p][i] == 0)
        ++p;
      if (p == k)
        return 0;
      std::swap(a[i], a[p]);
      sign = -sign;
    }
    for (std::size_t r = i + 1; r < k; ++r) {
      for (std::size_t c = i + 1; c < k; ++c)
        a[r][c] = (a[r][c] * a[i][i] - a[r][i] * a[i][c]) / prev;
      a[r][i] = 0;
    }
    prev = a[i][i];
  }
  BigInt d = a[k - 1][k - 1] * sign;
  return d < 0 ? BigInt(-d) : d;
}

} // namespace detail

/// |det(B^T B + 2I)| with B the signed vertex-edge incidence matrix of G_x.
inline BigInt count_bases_det(const Graph &g, std::span<const double> x,
                              double tol = 1e-12) {
  const auto ex = detail::level_edges(g, x, tol);
  const std::size_t k = ex.size();
  std::vector<std::vector<BigInt>> m(k, std::vector<BigInt>(k, 0));
  for (std::size_t i = 0; i < k; ++i) {
    const auto a = g.edge(ex[i]);
    m[i][i] = 4;
    for (std::size_t j = i + 1; j < k; ++j) {
      const auto b = g.edge(ex[j]);
      int dot = 0;
      dot += a.tail == b.tail ? 1 : 0;
      dot += a.head == b.head ? 1 : 0;
      dot -= a.tail == b.head ? 1 : 0;
      dot -= a.head == b.tail ? 1 : 0;
      m[i][j] = dot;
      m[j][i] = dot;
    }
  }
  return detail::bareiss_abs_det(std::move(m));
}

/// Counts (spanning forest of G_x, root per tree, orientation of every other
/// edge of G_x) by exhausting edge subsets of G_x.
inline BigInt enumerate_aligned_bases(const Graph &g, std::span<const double> x,
                                      double tol = 1e-12,
                                      std::size_t cap = kAlignedEdgeCap) {
  const auto ex = detail::level_edges(g, x, tol);
  const std::size_t k = ex.size();
  if (k > cap)
    throw OracleError(OracleError::Kind::TooLarge, k,
                      "enumerate_aligned_bases: " + std::to_string(k) +
                          " level edges exceed the cap of " +
                          std::to_string(cap));
  const std::size_t n = g.num_vertices();
  BigInt total = 0;
  std::vector<VertexId> uf(n);
  std::vector<std::size_t> size(n);
  const auto find = [&uf](VertexId v) {
    while (uf[v] != v)
      v = uf[v] = uf[uf[v]];
    return v;
  };
  for (std::uint32_t sub = 0; sub < (1u << k); ++sub) {
    for (std::size_t v = 0; v < n; ++v) {
      uf[v] = static_cast<VertexId>(v);
      size[v] = 1;
    }
    bool forest = true;
    for (std::size_t i = 0; i < k && forest; ++i) {
      if (!((sub >> i) & 1u))
        continue;
      const auto [t, h] = g.edge(ex[i]);
      VertexId a = find(t), b = find(h);
      if (a == b) {
        forest = false;
        break;
      }
      if (size[a] < size[b])
        std::swap(a, b);
      uf[b] = a;
      size[a] += size[b];
    }
    if (!forest)
      continue;
    BigInt roots = 1;
    for (std::size_t v = 0; v < n; ++v)
      if (uf[v] == static_cast<VertexId>(v))
        roots *= size[v];
    const auto others = k - static_cast<std::size_t>(std::popcount(sub));
    total += roots << others;
  }
  return total;
}

namespace detail {

inline BigRational exact(double v) {
  int exp = 0;
  const double mant = std::frexp(v, &exp);
  // 53-bit integer mantissa times a power of two.
  const auto m = static_cast<std::int64_t>(std::ldexp(mant, 53));
  BigRational r = BigRational(BigInt(m));
  exp -= 53;
  if (exp > 0)
    r *= BigRational(BigInt(1) << exp);
  else if (exp < 0)
    r /= BigRational(BigInt(1) << -exp);
  return r;
}

inline bool nonsingular(std::vector<std::vector<BigRational>> a) {
  const std::size_t k = a.size();
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t p = i;
    while (p < k && a[p][i] == 0)
      ++p;
    if (p == k)
      return false;
    std::swap(a[i], a[p]);
    for (std::size_t r = i + 1; r < k; ++r) {
      if (a[r][i] == 0)
        continue;
      const BigRational f = a[r][i] / a[i][i];
      for (std::size_t c = i; c < k; ++c)
        a[r][c] -= f * a[i][c];
    }
  }
  return true;
}

} // namespace detail

inline constexpr std::size_t kColumnCap = 16;

/// Number of bases of the full constraint matrix [edge rows; budget row]
/// whose basic solution is the point (x, a(x), s): nonsingular sets of |E|+1
/// columns that contain every column whose value is strictly between its
/// bounds. Exact rational arithmetic; columns capped at kColumnCap.
inline BigInt count_feasible_bases(const Instance &inst,
                                   std::span<const double> x, double s,
                                   double tol = 1e-12) {
  const std::size_t n = inst.num_vertices();
  const std::size_t m = inst.num_edges();
  const std::size_t cols = n + 2 * m + 1;
  if (cols > kColumnCap)
    throw OracleError(OracleError::Kind::TooLarge, cols,
                      "count_feasible_bases: " + std::to_string(cols) +
                          " columns exceed the cap of " +
                          std::to_string(kColumnCap));
  const std::size_t rows = m + 1;
  std::vector<std::vector<BigRational>> col(cols,
                                            std::vector<BigRational>(rows, 0));
  std::uint32_t forced = 0;
  for (std::size_t v = 0; v < n; ++v) {
    col[v][m] = detail::exact(inst.h[v]);
    if (x[v] > tol && x[v] < 1.0 - tol)
      forced |= 1u << v;
  }
  for (std::size_t e = 0; e < m; ++e) {
    const auto [t, h] = inst.graph.edge(static_cast<EdgeId>(e));
    col[t][e] = 1;
    col[h][e] = -1;
    col[n + 2 * e][e] = -1;
    col[n + 2 * e + 1][e] = 1;
    const double gap = x[t] - x[h];
    if (gap > tol)
      forced |= 1u << (n + 2 * e);
    if (gap < -tol)
      forced |= 1u << (n + 2 * e + 1);
  }
  col[cols - 1][m] = 1;
  if (s > tol)
    forced |= 1u << (cols - 1);

  BigInt count = 0;
  std::vector<std::vector<BigRational>> mat(rows,
                                            std::vector<BigRational>(rows));
  for (std::uint32_t sub = 0; sub < (1u << cols); ++sub) {
    if (static_cast<std::size_t>(std::popcount(sub)) != rows ||
        (sub & forced) != forced)
      continue;
    std::size_t j = 0;
    for (std::uint32_t r = sub; r; r &= r - 1, ++j) {
      const auto c = static_cast<std::size_t>(std::countr_zero(r));
      for (std::size_t i = 0; i < rows; ++i)
        mat[i][j] = col[c][i];
    }
    if (detail::nonsingular(mat))
      ++count;
  }
  return count;
}

namespace detail {

/// Vertices joined to `start` by Tree edges, skipping edge `cut`.
inline std::vector<VertexId> tree_component(const ForestBasis &f, VertexId start,
                                            EdgeId cut) {
  const auto &g = f.instance().graph;
  std::vector<char> seen(f.num_vertices(), 0);
  std::vector<VertexId> out{start};
  seen[start] = 1;
  for (std::size_t i = 0; i < out.size(); ++i)
    for (const auto &inc : g.incident(out[i]))
      if (inc.edge != cut && f.state(inc.edge) == EdgeState::Tree &&
          !seen[inc.other]) {
        seen[inc.other] = 1;
        out.push_back(inc.other);
      }
  return out;
}

/// Change in the basis objective from x to shifted. Basic edges contribute
/// their signed gap times the cost of the basic direction, tree edges the cost
/// of whichever direction opens. Only terms whose endpoints moved are summed.
inline double basis_objective_change(const ForestBasis &f,
                                     std::span<const double> x,
                                     std::span<const double> shifted) {
  const auto &inst = f.instance();
  const auto term = [&](EdgeId e, double gap) {
    switch (f.state(e)) {
    case EdgeState::BasicFwd:
      return inst.d_fwd[e] * gap;
    case EdgeState::BasicBwd:
      return -inst.d_bwd[e] * gap;
    case EdgeState::Tree:
      break;
    }
    return gap > 0.0 ? inst.d_fwd[e] * gap : -inst.d_bwd[e] * gap;
  };
  double change = 0.0;
  for (std::size_t v = 0; v < x.size(); ++v)
    if (shifted[v] != x[v])
      change += inst.c[v] * (shifted[v] - x[v]);
  for (std::size_t e = 0; e < inst.num_edges(); ++e) {
    const auto ee = static_cast<EdgeId>(e);
    const auto [t, h] = inst.graph.edge(ee);
    if (shifted[t] == x[t] && shifted[h] == x[h])
      continue;
    change += term(ee, shifted[t] - shifted[h]) - term(ee, x[t] - x[h]);
  }
  return change;
}

} // namespace detail

/// Difference quotient of the basis objective along the candidate's shift,
/// with the pattern rebuilt from the forest by graph search and the budget
/// compensation derived from weights. Same sign convention as reduced_cost.
/// The basis objective is linear along the shift, so the default unit step
/// loses nothing and avoids cancellation on large instances.
inline double fd_reduced_cost(const ForestBasis &f, const PivotCandidate &cand,
                              double step = 1.0) {
  const auto &inst = f.instance();
  const auto n = f.num_vertices();
  VertexId basic = kNoVertex;
  for (std::size_t v = 0; v < n; ++v)
    if (f.mark(static_cast<VertexId>(v)) == RootMark::BasicComponent)
      basic = static_cast<VertexId>(v);
  const auto weight = [&inst](const std::vector<VertexId> &s) {
    double w = 0.0;
    for (VertexId v : s)
      w += inst.h[v];
    return w;
  };

  std::vector<double> dir(n, 0.0);
  const double sigma = sign(cand.move);
  if (cand.kind == CandidateKind::SlackEnter) {
    const auto b = detail::tree_component(f, basic, kNoEdge);
    const double hb = weight(b);
    for (VertexId v : b)
      dir[v] = -1.0 / hb;
  } else {
    const auto moved = detail::tree_component(f, cand.vertex, cand.edge);
    const double hm = weight(moved);
    std::vector<char> in_moved(n, 0);
    for (VertexId v : moved)
      in_moved[v] = 1;
    if (basic == kNoVertex) {
      for (VertexId v : moved)
        dir[v] = sigma;
    } else {
      auto comp = detail::tree_component(f, basic, cand.edge);
      if (in_moved[basic])
        throw std::logic_error("fd_reduced_cost: basic root in moved set");
      const double hc = weight(comp);
      double share = 1.0;
      if (cand.kind == CandidateKind::BasicComponentEdge)
        share = hc / (hc + hm);
      for (VertexId v : moved)
        dir[v] = sigma * share;
      for (VertexId v : comp)
        dir[v] = -sigma * share * hm / hc;
    }
  }
  std::vector<double> shifted(f.x());
  for (std::size_t v = 0; v < n; ++v)
    shifted[v] += step * dir[v];
  const double rate =
      detail::basis_objective_change(f, f.x(), shifted) / step;
  return cand.kind == CandidateKind::RootVertex && cand.move == Move::Down
             ? -rate
             : rate;
}

struct SolutionViolation {
  enum class Kind {
    LengthMismatch,
    OutOfBounds,
    NegativeSlack,
    BudgetMismatch,
    ObjectiveMismatch,
    CertificateMismatch,
    CertificateViolated,
    OracleMismatch,
  };
  Kind kind;
  std::int64_t location = -1;
  std::string message;
};

inline const char *to_string(SolutionViolation::Kind k) {
  using K = SolutionViolation::Kind;
  switch (k) {
  case K::LengthMismatch: return "LengthMismatch";
  case K::OutOfBounds: return "OutOfBounds";
  case K::NegativeSlack: return "NegativeSlack";
  case K::BudgetMismatch: return "BudgetMismatch";
  case K::ObjectiveMismatch: return "ObjectiveMismatch";
  case K::CertificateMismatch: return "CertificateMismatch";
  case K::CertificateViolated: return "CertificateViolated";
  case K::OracleMismatch: return "OracleMismatch";
  }
  return "?";
}

/// Checks bounds, budget and objective of a stored solution. A certificate,
/// when given, is rebuilt into a basis at sol.x and every inequality is
/// re-derived by finite differences from the instance data.
inline std::optional<SolutionViolation>
verify_solution(const Instance &inst, const DenseSolution &sol, double tol,
                const Certificate *cert = nullptr) {
  using K = SolutionViolation::Kind;
  const auto fail = [](K k, std::int64_t at, std::string msg) {
    return std::optional<SolutionViolation>(
        SolutionViolation{k, at, std::move(msg)});
  };
  const auto n = inst.num_vertices();
  if (sol.x.size() != n)
    return fail(K::LengthMismatch, -1,
                "x has " + std::to_string(sol.x.size()) + " entries, expected " +
                    std::to_string(n));
  for (std::size_t v = 0; v < n; ++v)
    if (!(sol.x[v] >= -tol && sol.x[v] <= 1.0 + tol))
      return fail(K::OutOfBounds, static_cast<std::int64_t>(v),
                  "x[" + std::to_string(v) + "] = " +
                      detail::format_number(sol.x[v]) + " outside [0,1]");
  if (!(sol.s >= -tol))
    return fail(K::NegativeSlack, -1,
                "slack " + detail::format_number(sol.s) + " is negative");
  const double used = budget_used(inst, sol.x);
  const double scale = 1.0 + std::fabs(inst.delta);
  if (std::fabs(used + sol.s - inst.delta) > tol * scale)
    return fail(K::BudgetMismatch, -1,
                "h.x + s = " + detail::format_number(used + sol.s) +
                    " but delta = " + detail::format_number(inst.delta));
  std::vector<double> clamped(sol.x);
  for (auto &v : clamped)
    v = std::clamp(v, 0.0, 1.0);
  const double obj = evaluate_objective(inst, clamped);
  if (std::fabs(obj - sol.objective) > tol * (1.0 + std::fabs(obj)))
    return fail(K::ObjectiveMismatch, -1,
                "stored objective " + detail::format_number(sol.objective) +
                    " but x evaluates to " + detail::format_number(obj));
  if (!cert)
    return std::nullopt;

  std::optional<ForestBasis> basis;
  try {
    basis.emplace(restore(inst, cert->basis, sol.x,
                          cert->slack_basic ? sol.s : 0.0));
  } catch (const BasisError &e) {
    return fail(K::CertificateMismatch, e.index(), e.what());
  }
  if (auto bad = basis->check_invariants(std::max(tol, 1e-9)))
    return fail(K::CertificateMismatch, bad->location,
                std::string("certificate basis invalid: ") +
                    to_string(bad->kind));
  if (basis->slack_basic() != cert->slack_basic)
    return fail(K::CertificateMismatch, -1, "slack state disagrees");
  std::optional<SolutionViolation> out;
  Workspace ws;
  std::size_t count = 0;
  for_each_candidate(*basis, ws, [&](const PivotCandidate &cand) {
    if (out)
      return;
    const double fd = fd_reduced_cost(*basis, cand);
    const double rate =
        cand.kind == CandidateKind::RootVertex && cand.move == Move::Down ? -fd
                                                                          : fd;
    const auto at = cand.kind == CandidateKind::RootVertex ||
                            cand.kind == CandidateKind::SlackEnter
                        ? static_cast<std::int64_t>(cand.vertex)
                        : static_cast<std::int64_t>(cand.edge);
    if (rate < -1e-6 * (1.0 + std::fabs(rate)) - tol) {
      out = fail(K::CertificateViolated, at,
                 std::string("improving direction ") +
                     to_string(entry_kind(cand)) + " at " + std::to_string(at) +
                     " with rate " + detail::format_number(rate));
      return;
    }
    if (count < cert->entries.size()) {
      const auto &entry = cert->entries[count];
      if (entry.kind != entry_kind(cand) || entry.at != at ||
          std::fabs(entry.value - rate) > 1e-6 * (1.0 + std::fabs(rate)))
        out = fail(K::CertificateMismatch, at,
                   "stored certificate entry " + std::to_string(count) +
                       " does not match its recomputation");
    }
    ++count;
  });
  if (!out && count != cert->entries.size())
    out = fail(K::CertificateMismatch, -1, "certificate entry count differs");
  return out;
}

} // namespace tvsimplex
