#pragma once

#include "tvsimplex/forest.hpp"
#include "tvsimplex/instance.hpp"
#include "tvsimplex/simplex.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace tvs_test {

using namespace tvsimplex;

/// Path 0 -> 1 with c = (-3, 2), h = 1, alpha = 1.
inline Instance fix_p2(double delta) {
  return from_tv(Graph(2, {{0, 1}}), {-3.0, 2.0}, {1.0, 1.0}, 1.0, delta);
}

/// Path 0 -> 1 -> 2 with c = (1, 2, 3), h = 1, alpha = 1.
inline Instance p3(double delta = 3.0) {
  return from_tv(Graph(3, {{0, 1}, {1, 2}}), {1.0, 2.0, 3.0}, {1.0, 1.0, 1.0},
                 1.0, delta);
}

/// P3 as one tree rooted at 0 with every vertex at `value`.
inline ForestBasis p3_single_tree(const Instance &inst, double value,
                                  double slack) {
  const std::vector<EdgeId> parent{kNoEdge, 0, 1};
  const std::vector<RootMark> marks{
      value > 0.5 ? RootMark::Upper : RootMark::Lower, RootMark::None,
      RootMark::None};
  const std::vector<EdgeState> states{EdgeState::Tree, EdgeState::Tree};
  const std::vector<double> x(3, value);
  return ForestBasis(inst, parent, marks, states, x, slack);
}

/// c(S) plus the signed cost of every basic edge leaving or entering S,
/// computed straight from the edge list.
inline double basis_F(const ForestBasis &f, const std::vector<VertexId> &set) {
  const auto &inst = f.instance();
  std::vector<char> in(inst.num_vertices(), 0);
  double total = 0.0;
  for (VertexId v : set) {
    in[v] = 1;
    total += inst.c[v];
  }
  for (std::size_t e = 0; e < inst.num_edges(); ++e) {
    const auto [t, h] = inst.graph.edge(static_cast<EdgeId>(e));
    if (in[t] == in[h])
      continue;
    switch (f.state(static_cast<EdgeId>(e))) {
    case EdgeState::Tree:
      break;
    case EdgeState::BasicFwd:
      total += in[t] ? inst.d_fwd[e] : -inst.d_fwd[e];
      break;
    case EdgeState::BasicBwd:
      total += in[h] ? inst.d_bwd[e] : -inst.d_bwd[e];
      break;
    }
  }
  return total;
}

/// Vertices below v following tree edges away from v's parent.
inline std::vector<VertexId> below(const ForestBasis &f, VertexId v) {
  const auto &g = f.instance().graph;
  std::vector<VertexId> out{v};
  std::vector<char> seen(f.num_vertices(), 0);
  seen[v] = 1;
  if (f.parent(v) != kNoVertex)
    seen[f.parent(v)] = 1;
  for (std::size_t i = 0; i < out.size(); ++i)
    for (const auto &inc : g.incident(out[i]))
      if (f.state(inc.edge) == EdgeState::Tree && !seen[inc.other]) {
        seen[inc.other] = 1;
        out.push_back(inc.other);
      }
  return out;
}

/// Portable draws: raw engine output only, no library distributions.
class Draw {
public:
  explicit Draw(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t below(std::uint64_t n) { return eng_() % n; }
  bool chance(unsigned percent) { return below(100) < percent; }
  /// Multiple of 1/64 in [lo, hi].
  double dyadic(double lo, double hi) {
    const auto steps = static_cast<std::uint64_t>((hi - lo) * 64.0);
    return lo + static_cast<double>(below(steps + 1)) / 64.0;
  }

private:
  std::mt19937_64 eng_;
};

struct SuiteCase {
  std::string name;
  Instance inst;
};

inline Graph suite_graph(int family, Draw &rng) {
  switch (family) {
  case 0:
    return build_grid(2);
  case 1:
    return Graph(6, {{0, 1}, {1, 2}, {3, 4}, {4, 5}, {0, 3}, {1, 4}, {2, 5}});
  case 2:
    return build_grid(3);
  default: {
    const auto n = static_cast<VertexId>(2 + rng.below(7));
    std::vector<EdgeEnds> edges;
    for (VertexId a = 0; a < n; ++a)
      for (VertexId b = a + 1; b < n; ++b)
        if (rng.chance(45))
          edges.push_back(rng.chance(50) ? EdgeEnds{a, b} : EdgeEnds{b, a});
    return Graph(static_cast<std::size_t>(n), std::move(edges));
  }
  }
}

/// Small dyadic instances: grids 2x2, 2x3, 3x3 and random simple graphs on
/// at most 8 vertices, alpha in {0.5, 1, 2}, delta in {0.25, 0.5, 0.9} h(V).
inline std::vector<SuiteCase> small_suite(std::size_t per_combo = 10,
                                          std::uint64_t seed = 2024) {
  static constexpr std::array<double, 3> kAlphas{0.5, 1.0, 2.0};
  static constexpr std::array<double, 3> kFractions{0.25, 0.5, 0.9};
  static constexpr std::array<const char *, 4> kFamilies{"grid2x2", "grid2x3",
                                                         "grid3x3", "random"};
  Draw rng(seed);
  std::vector<SuiteCase> out;
  for (int fam = 0; fam < 4; ++fam)
    for (double alpha : kAlphas)
      for (double frac : kFractions)
        for (std::size_t k = 0; k < per_combo; ++k) {
          Graph g = suite_graph(fam, rng);
          const auto n = g.num_vertices();
          std::vector<double> c(n), h(n, 1.0);
          for (auto &cv : c)
            cv = rng.dyadic(-2.5, 1.5);
          if (k % 2 == 1)
            for (auto &hv : h)
              hv = 0.25 * static_cast<double>(1 + rng.below(4));
          Instance inst = from_tv(std::move(g), std::move(c), std::move(h),
                                  alpha, 0.0);
          inst.delta = frac * inst.total_weight();
          out.push_back({std::string(kFamilies[fam]) + "/a" +
                             detail::format_number(alpha) + "/f" +
                             detail::format_number(frac) + "/" +
                             std::to_string(k),
                         std::move(inst)});
        }
  return out;
}

/// Connected components of the fractional vertices (0 < x < 1).
inline std::size_t fractional_components(const Instance &inst,
                                         const std::vector<double> &x,
                                         double tol = 1e-9) {
  const auto n = inst.num_vertices();
  std::vector<char> frac(n, 0), seen(n, 0);
  for (std::size_t v = 0; v < n; ++v)
    frac[v] = x[v] > tol && x[v] < 1.0 - tol;
  std::size_t comps = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (!frac[s] || seen[s])
      continue;
    ++comps;
    std::vector<VertexId> stack{static_cast<VertexId>(s)};
    seen[s] = 1;
    while (!stack.empty()) {
      const VertexId v = stack.back();
      stack.pop_back();
      for (const auto &inc : inst.graph.incident(v))
        if (frac[inc.other] && !seen[inc.other]) {
          seen[inc.other] = 1;
          stack.push_back(inc.other);
        }
    }
  }
  return comps;
}

} // namespace tvs_test
